#pragma once

// Quaternions over an arbitrary field type. With an exact rational scalar the
// SU(2) kernel identity below is checked without rounding.

#include <array>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace cliffpen {

using Rational = boost::multiprecision::cpp_rational;

template <class T>
struct Quaternion {
  T w{}, x{}, y{}, z{};

  friend Quaternion operator+(const Quaternion& a, const Quaternion& b) {
    return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend Quaternion operator-(const Quaternion& a, const Quaternion& b) {
    return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend Quaternion operator*(const Quaternion& a, const Quaternion& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  }
  friend Quaternion operator*(const T& s, const Quaternion& a) {
    return {s * a.w, s * a.x, s * a.y, s * a.z};
  }
  friend bool operator==(const Quaternion&, const Quaternion&) = default;

  T norm2() const { return w * w + x * x + y * y + z * z; }

  static Quaternion one() { return {T(1), T(0), T(0), T(0)}; }
  static Quaternion i() { return {T(0), T(1), T(0), T(0)}; }
  static Quaternion j() { return {T(0), T(0), T(1), T(0)}; }
  static Quaternion k() { return {T(0), T(0), T(0), T(1)}; }
};

using ExactQuaternion = Quaternion<Rational>;

/// Unit quaternions with rational coordinates used as sample points on SU(2).
std::vector<ExactQuaternion> su2_sample_points();

struct Su2Residual {
  Rational max_norm2;  // exact squared norm of the worst residual
  double max_norm;     // its square root
  ExactQuaternion worst_value;
};

/// Dirac-type operator of the left-invariant frame v_l = w_l xi_l,
/// xi = (i, j, k), applied to the inclusion f(q) = q with J_l acting by right
/// multiplication with xi_l: sum_l (q w_l xi_l) xi_l. Evaluated at the given
/// points (default: su2_sample_points()).
Su2Residual su2_counterexample_residual(const std::array<double, 3>& weights);
Su2Residual su2_counterexample_residual(const std::array<double, 3>& weights,
                                        const std::vector<ExactQuaternion>& points);

}  // namespace cliffpen
