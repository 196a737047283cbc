#include <doctest.h>

#include <cmath>
#include <random>

#include "cliffpen/hamiltonian.hpp"

using namespace cliffpen;

namespace {

constexpr double kPi = 3.14159265358979323846;

TrigHamiltonian cos_x1(double eps, int r = 1, int d = 2) {
  TrigTerm t{std::vector<int>(r, 0), std::vector<int>(d, 0), eps, 0.0};
  t.n[0] = 1;
  return TrigHamiltonian(r, d, {t});
}

TrigHamiltonian random_hamiltonian(std::mt19937_64& rng, int r, int d, const LatticeTorus& lat) {
  std::uniform_int_distribution<int> mode(-2, 2);
  std::normal_distribution<double> c(0.0, 0.1);
  std::vector<TrigTerm> terms;
  for (int i = 0; i < 5; ++i) {
    TrigTerm t{std::vector<int>(r), std::vector<int>(d), c(rng), c(rng)};
    for (int& v : t.m) v = mode(rng);
    for (int& v : t.n) v = mode(rng);
    terms.push_back(t);
  }
  return TrigHamiltonian(r, d, terms, lat);
}

// Base point anywhere on the torus, oscillation at the amplitude of a fiber start.
FourierField random_field(int r, int cutoff, int d, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, scale);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FourierField f(ModeSet::make(r, cutoff), d);
  for (std::size_t i = 0; i < f.modes().size(); ++i)
    for (cplx& c : f.mode(i)) c = i == 0 ? cplx(u(rng), 0) : cplx(nd(rng), nd(rng));
  return f;
}

std::span<const double> sp(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

double op_norm(const Matrix& m) { return Eigen::JacobiSVD<Matrix>(m).singularValues()(0); }

}  // namespace

TEST_CASE("derivative examples") {
  const TrigHamiltonian h = cos_x1(1.0);
  const double t[] = {0.0}, x[] = {0.0, 0.0};
  CHECK(h.eval(t, x) == 1.0);
  CHECK(h.grad_x(t, x).norm() == 0.0);
  const Matrix hs = h.hess_x(t, x);
  CHECK(hs(0, 0) == doctest::Approx(-4 * kPi * kPi));
  CHECK(hs(1, 1) == 0.0);

  const TrigHamiltonian time_only(1, 2, {TrigTerm{{1}, {0, 0}, 0.3, 0.2}});
  const double y[] = {0.17, 0.61}, s[] = {0.3};
  CHECK(time_only.grad_x(s, y).norm() == 0.0);
  CHECK_FALSE(time_only.depends_on_space());
  CHECK(time_only.depends_on_time());

  // cos(2 pi t) cos(2 pi x1) = (cos(2 pi (t + x1)) + cos(2 pi (t - x1))) / 2.
  const TrigHamiltonian prod(1, 2, {TrigTerm{{1}, {1, 0}, 0.5, 0.0}, TrigTerm{{1}, {-1, 0}, 0.5, 0.0}});
  const double quarter[] = {0.25};
  for (double x1 : {0.0, 0.13, 0.5, 0.77}) {
    const double p[] = {x1, 0.4};
    CHECK(std::abs(prod.eval(quarter, p)) < 1e-15);
    CHECK(prod.grad_x(quarter, p).norm() < 1e-14);
  }
}

TEST_CASE("gradient and Hessian match central differences") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix basis(3, 3);
  basis << 1.0, 0.2, 0.0, 0.0, 0.9, 0.1, 0.3, 0.0, 1.2;
  const LatticeTorus lat = LatticeTorus::from_basis(basis);
  const TrigHamiltonian h = random_hamiltonian(rng, 2, 3, lat);
  const double step = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const double t[] = {u(rng), u(rng)};
    Vector x(3);
    for (int a = 0; a < 3; ++a) x[a] = u(rng);
    const Vector g = h.grad_x(t, sp(x));
    const Matrix hs = h.hess_x(t, sp(x));
    Vector gfd(3);
    Matrix hfd(3, 3);
    for (int a = 0; a < 3; ++a) {
      Vector xp = x, xm = x;
      xp[a] += step;
      xm[a] -= step;
      gfd[a] = (h.eval(t, sp(xp)) - h.eval(t, sp(xm))) / (2 * step);
      hfd.col(a) = (h.grad_x(t, sp(xp)) - h.grad_x(t, sp(xm))) / (2 * step);
    }
    const SupNorms s = h.sup_norms();
    CHECK((g - gfd).norm() <= 1e-7 * std::max(g.norm(), s.grad_inf));
    CHECK((hs - hfd).norm() <= 1e-7 * std::max(hs.norm(), s.hess_inf));
    CHECK((hs - hs.transpose()).norm() <= 1e-14 * s.hess_inf);
  }
}

TEST_CASE("sup norm bounds") {
  const SupNorms one = cos_x1(0.1).sup_norms();
  CHECK(one.h_inf == doctest::Approx(0.1));
  CHECK(one.grad_inf == doctest::Approx(0.2 * kPi));
  CHECK(one.hess_inf == doctest::Approx(0.4 * kPi * kPi));
  const SupNorms zero = TrigHamiltonian::zero(1, 2).sup_norms();
  CHECK(zero.h_inf == 0.0);
  CHECK(zero.hess_inf == 0.0);

  // Dense-grid oracle for a two-term Hamiltonian.
  const TrigHamiltonian two(1, 2, {TrigTerm{{0}, {1, 0}, 0.1, 0.05}, TrigTerm{{1}, {1, 1}, -0.07, 0.02}});
  const SupNorms b = two.sup_norms();
  double hmax = 0, gmax = 0, hsmax = 0;
  const int n = 40;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double t[] = {static_cast<double>(i) / n}, x[] = {static_cast<double>(j) / n, static_cast<double>(k) / n};
        hmax = std::max(hmax, std::abs(two.eval(t, x)));
        gmax = std::max(gmax, two.grad_x(t, x).norm());
        hsmax = std::max(hsmax, op_norm(two.hess_x(t, x)));
      }
  CHECK(b.h_inf >= hmax);
  CHECK(b.grad_inf >= gmax);
  CHECK(b.hess_inf >= hsmax);
}

TEST_CASE("lattice reduction and torus distance") {
  Matrix basis(2, 2);
  basis << 2.0, 0.0, 0.0, 0.5;
  const LatticeTorus lat = LatticeTorus::from_basis(basis);
  Vector x(2);
  x << 5.0, -0.2;
  const Vector u = lat.reduce(x);
  CHECK(u[0] == doctest::Approx(0.5));
  CHECK(u[1] == doctest::Approx(0.6));
  Vector near(2);
  near << 2.0 - 1e-14, 0.0;
  CHECK(lat.reduce(near)[0] == 0.0);
  Vector a(2), b(2);
  a << 0.1, 0.05;
  b << 1.9, 0.45;
  CHECK(lat.torus_distance(a, b) == doctest::Approx(std::hypot(0.2, 0.1)));
  CHECK_THROWS_AS(LatticeTorus::from_basis(Matrix::Zero(2, 2)), FieldError);
}

TEST_CASE("nabla_h_field examples and oversampled oracle") {
  const TrigHamiltonian h = cos_x1(0.1);
  FourierField f(ModeSet::make(1, 4), 2);
  Vector x(2);
  x << 0.3, 0.8;
  f.set_mean(x);
  const FourierField g = nabla_h_field(f, h);
  const double t0[] = {0.0};
  CHECK((g.mean() - h.grad_x(t0, sp(x))).norm() < 1e-15);
  CHECK(l2_norm(g) == doctest::Approx(h.grad_x(t0, sp(x)).norm()));

  x << 0.5, 0.0;
  f.set_mean(x);
  CHECK(l2_norm(nabla_h_field(f, h)) < 1e-15);

  std::mt19937_64 rng(2);
  const LatticeTorus lat = LatticeTorus::standard(2);
  for (int trial = 0; trial < 5; ++trial) {
    const TrigHamiltonian hr = random_hamiltonian(rng, 1, 2, lat);
    const FourierField fr = random_field(1, 4, 2, 2e-3, rng);
    const FourierField got = nabla_h_field(fr, hr);
    // Oracle: direct evaluation on a much finer grid, projected onto the same modes.
    const SpectralGrid fine(1, 4 * required_grid_points(4, hr) + 1);
    std::vector<double> vals(fine.size() * 2);
    std::vector<double> tt(1);
    for (std::size_t p = 0; p < fine.size(); ++p) {
      fine.point(p, tt);
      const Vector fv = fr.value_at(tt);
      const Vector gv = hr.grad_x(tt, sp(fv));
      vals[2 * p] = gv[0];
      vals[2 * p + 1] = gv[1];
    }
    const FourierField oracle = fine.analyze(vals, 2, fr.mode_set());
    CHECK(l2_norm(got - oracle) <= 1e-10 * std::max(1.0, l2_norm(oracle)));
    CHECK(got.zero_mode_imag() == 0.0);
  }
  CHECK_THROWS_AS(nabla_h_field(f, h, 5), FieldError);
}

TEST_CASE("action examples") {
  const CliffordModule m = build_clifford_module(1);
  const Frame fr = Frame::identity(1);
  FourierField c(ModeSet::make(1, 3), 2);
  Vector x(2);
  x << 0.2, 0.7;
  c.set_mean(x);
  CHECK(action(c, TrigHamiltonian::zero(1, 2), fr, m) == 0.0);
  const TrigHamiltonian h = cos_x1(0.1);
  const double t0[] = {0.0};
  CHECK(action(c, h, fr, m) == doctest::Approx(-h.eval(t0, sp(x))).epsilon(1e-14));

  // (cos, sin) has D phi = -2 pi phi and unit norm.
  FourierField phi(ModeSet::make(1, 3), 2);
  const std::size_t k1 = *phi.modes().find(std::vector<int>{1});
  phi.mode(k1)[0] = 0.5;
  phi.mode(k1)[1] = cplx(0, -0.5);
  CHECK(l2_norm(phi) == doctest::Approx(1.0));
  CHECK(action(phi, TrigHamiltonian::zero(1, 2), fr, m) == doctest::Approx(-kPi));

  // Independent of the base point when H = 0.
  FourierField shifted = phi;
  shifted.set_mean(x);
  CHECK(action(shifted, TrigHamiltonian::zero(1, 2), fr, m) == doctest::Approx(-kPi));
}
