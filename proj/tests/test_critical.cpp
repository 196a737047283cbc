#include <doctest.h>

#include "instances.hpp"

using namespace cliffpen;
using namespace cliffpen::testing;

namespace {

const CriticalRecord* match(const std::vector<CriticalRecord>& recs, const Vector& x, double tol) {
  const LatticeTorus lat = LatticeTorus::standard(static_cast<int>(x.size()));
  for (const CriticalRecord& r : recs)
    if (lat.torus_distance(r.x, x) <= tol) return &r;
  return nullptr;
}

double fiber_norm(const CriticalRecord& r) {
  FourierField f = r.g + r.h;
  f.set_mean(Vector::Zero(f.dim_v()));
  return l2_norm(f);
}

SearchOptions quick(int starts) {
  SearchOptions o;
  o.starts = starts;
  o.seed = 1;
  return o;
}

CriticalRecord fake(double phi, bool nondegenerate, double lifted = 0.0) {
  CriticalRecord r;
  r.phi = phi;
  r.classified = true;
  r.nondegenerate = nondegenerate;
  r.lifted_residual = lifted;
  return r;
}

}  // namespace

TEST_CASE("H = 0 is a degenerate continuum") {
  const Frame fr = Frame::identity(1);
  const Reduction zero(build_clifford_module(1), fr, TrigHamiltonian::zero(1, 2),
                       make_truncation(fr, 4, 2 * kPi, 0.0));
  const SearchResult res = find_critical_points(zero, quick(8));
  CHECK(res.degenerate_continuum);
  CHECK(res.records.empty());

  Vector x(2);
  x << 0.4, 0.9;
  FourierField g = zero.zero_field();
  g.set_mean(x);
  CriticalRecord rec = make_record(zero, g);
  CHECK(rec.residual == 0.0);
  classify(zero, rec);
  CHECK_FALSE(rec.nondegenerate);
  CHECK(rec.margin == 0.0);
  CHECK(rec.signature[2] == 2);
}

TEST_CASE("instance A1 matches the dense grid oracle") {
  const TrigHamiltonian h = a1_hamiltonian();
  const std::vector<Vector> oracle = grid_critical_points(h);
  REQUIRE(oracle.size() == 4);
  const Reduction red = make_reduction(h, 8);
  const SearchResult res = find_critical_points(red, quick(32));
  CHECK_FALSE(res.degenerate_continuum);
  REQUIRE(res.records.size() == oracle.size());
  for (const Vector& x : oracle) {
    const CriticalRecord* r = match(res.records, x, 1e-8);
    REQUIRE(r != nullptr);
    CHECK(r->residual <= 1e-10);
    CHECK(r->lifted_residual <= 1e-8);
    CHECK(fiber_norm(*r) <= 1e-10);
    CHECK(r->nondegenerate);
    CHECK(r->classified);
    CHECK(r->signature[0] + r->signature[1] == red.reduced_dim());
    CHECK(r->signature[2] == 0);
    const double t0[] = {0.0};
    CHECK(r->phi == doctest::Approx(-h.eval(t0, std::span<const double>(x.data(), 2))).epsilon(1e-12));
  }
  for (std::size_t i = 1; i < res.records.size(); ++i) CHECK(res.records[i - 1].phi <= res.records[i].phi);
  for (const CriticalRecord& r : res.records)
    for (double v : r.x) CHECK((v >= 0.0 && v < 1.0));

  // Base block signature reflects the Morse index of H (Phi's base block is -Hess H).
  const CriticalRecord* max = match(res.records, Vector::Zero(2), 1e-8);
  REQUIRE(max != nullptr);
  const CriticalRecord* min = match(res.records, Vector::Constant(2, 0.5), 1e-8);
  REQUIRE(min != nullptr);
  CHECK(max->signature[0] == min->signature[0] + 2);

  const TheoremVerdict v = verify_theorem(res.records, true, 2);
  CHECK(v.pass);
  CHECK(v.bound == "SB");
  CHECK(v.required == 4);
  CHECK(v.label == "PASS");
  CHECK(v.max_lifted_residual <= 1e-8);

  SUBCASE("dedup is idempotent and absorbs near copies") {
    const auto once = dedup(red, res.records);
    const auto twice = dedup(red, once);
    REQUIRE(once.size() == twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) CHECK((once[i].x - twice[i].x).norm() == 0.0);
    std::vector<CriticalRecord> padded = res.records;
    CriticalRecord copy = res.records.front();
    copy.x[0] = std::fmod(copy.x[0] + 1.0 - 1e-8, 1.0);
    copy.residual = 1.0;
    padded.push_back(copy);
    CHECK(dedup(red, padded).size() == res.records.size());
  }

  SUBCASE("translation equivariance") {
    Vector s(2);
    s << 0.25, 0.1;
    std::vector<TrigTerm> shifted;
    for (const TrigTerm& t : h.terms()) {
      const double th = 2 * kPi * (t.n[0] * s[0] + t.n[1] * s[1]);
      shifted.push_back({t.m, t.n, t.cos_coeff * std::cos(th) - t.sin_coeff * std::sin(th),
                         t.cos_coeff * std::sin(th) + t.sin_coeff * std::cos(th)});
    }
    const TrigHamiltonian hs(1, 2, shifted);
    const double t0[] = {0.0}, y[] = {0.3, 0.45}, ys[] = {0.55, 0.55};
    REQUIRE(hs.eval(t0, ys) == doctest::Approx(h.eval(t0, y)));
    const SearchResult moved = find_critical_points(make_reduction(hs, 8), quick(32));
    REQUIRE(moved.records.size() == res.records.size());
    for (const CriticalRecord& r : res.records) {
      Vector target = r.x + s;
      for (auto& v : target) v -= std::floor(v);
      const CriticalRecord* m = match(moved.records, target, 1e-8);
      REQUIRE(m != nullptr);
      CHECK(m->phi == doctest::Approx(r.phi).epsilon(1e-12));
    }
  }
}

TEST_CASE("instance A3 degenerate saddle") {
  const TrigHamiltonian h = a3_hamiltonian();
  const std::vector<Vector> oracle = grid_critical_points(h);
  REQUIRE(oracle.size() == 3);
  const Reduction red = make_reduction(h, 8);
  const SearchResult res = find_critical_points(red, quick(32));
  REQUIRE(res.records.size() == 3);
  int degenerate = 0;
  for (const CriticalRecord& r : res.records) {
    CHECK(r.lifted_residual <= 1e-8);
    if (!r.nondegenerate) {
      ++degenerate;
      CHECK(LatticeTorus::standard(2).torus_distance(r.x, Vector::Zero(2)) <= 1e-4);
      CHECK(r.margin <= 1e-8 * r.hess_norm);
    }
  }
  CHECK(degenerate == 1);
  const TheoremVerdict v = verify_theorem(res.records, false, 2);
  CHECK(v.bound == "CL+1");
  CHECK(v.required == 3);
  CHECK(v.pass);
}

TEST_CASE("classify on explicit Hessians") {
  CriticalRecord r;
  Reduction::DenseHessian hs;
  hs.matrix = Vector::Map(std::array<double, 3>{3.0, -2.0, 1.0}.data(), 3).asDiagonal();
  classify(hs, r);
  CHECK(r.nondegenerate);
  CHECK(r.margin == 1.0);
  CHECK(r.hess_norm == 3.0);
  CHECK(r.signature == std::array<int, 3>{2, 1, 0});
  hs.matrix(2, 2) = 1e-9;
  classify(hs, r);
  CHECK_FALSE(r.nondegenerate);
  CHECK(r.signature == std::array<int, 3>{1, 1, 1});
  hs.matrix.setZero();
  classify(hs, r);
  CHECK_FALSE(r.nondegenerate);
}

TEST_CASE("Arnold bounds and verdicts") {
  CHECK(arnold_bounds(1).sum_betti == 2);
  CHECK(arnold_bounds(1).cup_length_plus_1 == 2);
  CHECK(arnold_bounds(2).sum_betti == 4);
  CHECK(arnold_bounds(2).cup_length_plus_1 == 3);
  CHECK(arnold_bounds(4).sum_betti == 16);
  CHECK(arnold_bounds(4).cup_length_plus_1 == 5);
  CHECK_THROWS_AS(arnold_bounds(2, "sphere"), SearchError);

  const TheoremVerdict one = verify_theorem({fake(0.0, true)}, true, 2);
  CHECK_FALSE(one.pass);
  CHECK(one.required == 4);
  CHECK(one.label == "SHORTFALL (search shortfall, not a theorem violation)");

  // A degenerate record falls back to CL + 1.
  const TheoremVerdict mixed =
      verify_theorem({fake(0.0, true), fake(0.1, false), fake(0.2, true, 3e-9)}, true, 1);
  CHECK(mixed.pass);
  CHECK(mixed.bound == "CL+1");
  CHECK(mixed.required == 2);
  CHECK(mixed.max_lifted_residual == 3e-9);

  // H declared degenerate also falls back.
  CHECK(verify_theorem({fake(0.0, true), fake(0.1, true), fake(0.2, true)}, false, 2).pass);
  CHECK_FALSE(verify_theorem({fake(0.0, true), fake(0.1, true), fake(0.2, true)}, true, 2).pass);
  CHECK_FALSE(verify_theorem({}, true, 2).pass);
}

TEST_CASE("search starts and Newton") {
  const Reduction red = make_reduction(a1_hamiltonian(), 8);
  SearchOptions o = quick(16);
  o.fiber_radius = 0.02;
  const auto a = search_starts(red, o), b = search_starts(red, o);
  REQUIRE(a.size() == 16);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(l2_norm(a[i] - b[i]) == 0.0);
    for (double v : a[i].mean()) CHECK((v > 0.0 && v < 1.0));
    FourierField f = a[i];
    f.set_mean(Vector::Zero(2));
    CHECK(l2_norm(f) <= 0.02 * (1 + 1e-12));
  }
  o.seed = 2;
  CHECK(l2_norm(search_starts(red, o)[0] - a[0]) > 0.0);

  FourierField g0 = red.zero_field();
  Vector x(2);
  x << 0.47, 0.04;
  g0.set_mean(x);
  const NewtonResult nr = newton_solve(red, g0, o);
  CHECK(nr.converged);
  CHECK(nr.residual <= 1e-10);
  Vector expect(2);
  expect << 0.5, 0.0;
  CHECK(LatticeTorus::standard(2).torus_distance(nr.g.mean(), expect) <= 1e-9);

  // The matrix-free route reaches the same point.
  o.dense_limit = 0;
  const NewtonResult it = newton_solve(red, g0, o);
  CHECK(it.converged);
  CHECK(LatticeTorus::standard(2).torus_distance(it.g.mean(), expect) <= 1e-9);

  o.starts = 0;
  CHECK_THROWS_AS(find_critical_points(red, o), SearchError);
}

TEST_CASE("time-dependent records satisfy the lifted equation") {
  const Reduction red = make_reduction(timedep_hamiltonian(), 8);
  const SearchResult res = find_critical_points(red, quick(24));
  REQUIRE_FALSE(res.records.empty());
  for (const CriticalRecord& r : res.records) {
    CHECK(r.residual <= 1e-10);
    CHECK(r.lifted_residual <= 1e-8);
    CHECK(red.fixed_point_residual(r.g, r.h) <= 10 * red.options().fiber_tol);
  }
  // A non-critical point violates the lifted equation visibly.
  FourierField g = red.zero_field();
  Vector x(2);
  x << 0.2, 0.3;
  g.set_mean(x);
  CHECK(red.lifted_residual(red.evaluate(g)) > 1e-3);
}
