#include <doctest.h>

#include "cliffpen/quaternion.hpp"

using namespace cliffpen;

TEST_CASE("Hamilton product relations hold exactly") {
  using Q = ExactQuaternion;
  CHECK(Q::i() * Q::j() == Q::k());
  CHECK(Q::j() * Q::k() == Q::i());
  CHECK(Q::k() * Q::i() == Q::j());
  const Q minus_one{Rational(-1), Rational(0), Rational(0), Rational(0)};
  CHECK(Q::i() * Q::i() == minus_one);
  CHECK(Q::i() * Q::j() * Q::k() == minus_one);

  const Q a{Rational(1, 3), Rational(-2, 7), Rational(5), Rational(1, 2)};
  const Q b{Rational(-4), Rational(1, 5), Rational(0), Rational(3, 11)};
  const Q c{Rational(2, 9), Rational(1), Rational(-1, 4), Rational(6)};
  CHECK((a * b) * c == a * (b * c));
  CHECK((a * b).norm2() == a.norm2() * b.norm2());
}

TEST_CASE("sample points lie exactly on the unit sphere") {
  const auto pts = su2_sample_points();
  CHECK(pts.size() >= 16);
  for (const ExactQuaternion& q : pts) CHECK(q.norm2() == Rational(1));
}

TEST_CASE("su2 counterexample residual") {
  const Su2Residual kernel = su2_counterexample_residual({2, -1, -1});
  CHECK(kernel.max_norm2 == Rational(0));
  CHECK(kernel.max_norm == 0.0);

  const std::vector<ExactQuaternion> one{ExactQuaternion::one()};
  const Su2Residual at_one = su2_counterexample_residual({1, 1, 1}, one);
  CHECK(at_one.worst_value == ExactQuaternion{Rational(-3), Rational(0), Rational(0), Rational(0)});
  CHECK(at_one.max_norm2 == Rational(9));
  CHECK(at_one.max_norm == 3.0);

  CHECK(su2_counterexample_residual({0, 0, 0}).max_norm2 == Rational(0));
}

TEST_CASE("residual equals -(w1 + w2 + w3) q at every sample point") {
  // (q w xi) xi = -w q, so the sum is -(sum w) q with |.| = |sum w| on S^3.
  for (const std::array<double, 3> w : {std::array<double, 3>{1, 2, 3}, {0.5, -0.25, 4}, {-1, -1, 1}}) {
    for (const ExactQuaternion& q : su2_sample_points()) {
      const Su2Residual r = su2_counterexample_residual(w, {q});
      const Rational s = Rational(w[0]) + Rational(w[1]) + Rational(w[2]);
      CHECK(r.worst_value == (-s) * q);
    }
  }
}
