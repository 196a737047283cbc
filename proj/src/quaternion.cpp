#include "cliffpen/quaternion.hpp"

#include <cmath>

namespace cliffpen {

std::vector<ExactQuaternion> su2_sample_points() {
  // Pythagorean quadruples and a few hand-picked rational points on S^3.
  const auto q = [](long a, long b, long c, long d, long den) {
    return ExactQuaternion{Rational(a, den), Rational(b, den), Rational(c, den), Rational(d, den)};
  };
  return {q(1, 0, 0, 0, 1),  q(0, 1, 0, 0, 1),   q(0, 0, 1, 0, 1),   q(0, 0, 0, 1, 1),
          q(1, 1, 1, 1, 2),  q(1, -1, 1, -1, 2), q(3, 4, 0, 0, 5),   q(0, 3, 0, 4, 5),
          q(2, 1, 2, 0, 3),  q(1, 2, 2, 0, 3),   q(2, 3, 6, 0, 7),   q(1, 4, 8, 0, 9),
          q(2, 4, 5, 6, 9),  q(-6, 2, 3, 0, 7),  q(4, 4, -7, 0, 9),  q(2, -2, 4, 5, 7)};
}

Su2Residual su2_counterexample_residual(const std::array<double, 3>& weights,
                                        const std::vector<ExactQuaternion>& points) {
  const std::array<ExactQuaternion, 3> xi{ExactQuaternion::i(), ExactQuaternion::j(),
                                          ExactQuaternion::k()};
  Su2Residual out{Rational(0), 0.0, ExactQuaternion{}};
  for (const ExactQuaternion& q : points) {
    ExactQuaternion acc{};
    for (int l = 0; l < 3; ++l) {
      const ExactQuaternion tangent = q * (Rational(weights[l]) * xi[l]);  // L_{v_l} f at q
      acc = acc + tangent * xi[l];                                         // J_l: right mult
    }
    const Rational n2 = acc.norm2();
    if (n2 > out.max_norm2) {
      out.max_norm2 = n2;
      out.worst_value = acc;
    }
  }
  out.max_norm = std::sqrt(static_cast<double>(out.max_norm2));
  return out;
}

Su2Residual su2_counterexample_residual(const std::array<double, 3>& weights) {
  return su2_counterexample_residual(weights, su2_sample_points());
}

}  // namespace cliffpen
