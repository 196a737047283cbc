#pragma once

// Shared problem instances for the test binaries.

#include <cmath>
#include <numbers>
#include <random>

#include "cliffpen/critical.hpp"

namespace cliffpen::testing {

inline constexpr double kPi = std::numbers::pi;

inline TrigTerm cos_term(std::vector<int> m, std::vector<int> n, double c) { return {std::move(m), std::move(n), c, 0.0}; }
inline TrigTerm sin_term(std::vector<int> m, std::vector<int> n, double s) { return {std::move(m), std::move(n), 0.0, s}; }

// 0.1 (cos 2 pi x1 + cos 2 pi x2) on T^2, r = 1.
inline TrigHamiltonian a1_hamiltonian() {
  return TrigHamiltonian(1, 2, {cos_term({0}, {1, 0}, 0.1), cos_term({0}, {0, 1}, 0.1)});
}

// 0.05 sum cos 2 pi x_i on T^4, r = 3.
inline TrigHamiltonian a2_hamiltonian() {
  std::vector<TrigTerm> terms;
  for (int i = 0; i < 4; ++i) {
    std::vector<int> n(4, 0);
    n[i] = 1;
    terms.push_back(cos_term({0, 0, 0}, n, 0.05));
  }
  return TrigHamiltonian(3, 4, terms);
}

// 0.2 sin(pi x1) sin(pi x2) sin(pi (x1 + x2)): max, min, monkey saddle at 0.
inline TrigHamiltonian a3_hamiltonian() {
  return TrigHamiltonian(1, 2, {sin_term({0}, {1, 0}, 0.05), sin_term({0}, {0, 1}, 0.05),
                                sin_term({0}, {1, 1}, -0.05)});
}

// 0.05 cos 2 pi t cos 2 pi x1.
inline TrigHamiltonian timedep_hamiltonian() {
  return TrigHamiltonian(1, 2, {cos_term({1}, {1, 0}, 0.025), cos_term({1}, {-1, 0}, 0.025)});
}

inline Reduction make_reduction(const TrigHamiltonian& h, int cutoff, ReductionOptions opts = {}) {
  const int r = h.time_rank();
  const CliffordModule m = build_clifford_module(r, h.space_dim());
  const Frame fr = Frame::identity(r);
  return Reduction(m, fr, h, choose_truncation(h, fr, m, cutoff), opts);
}

inline Vector random_coords(const Reduction& red, double fiber, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> nd;
  Vector v(red.reduced_dim());
  for (int a = 0; a < red.dim_v(); ++a) v[a] = u(rng);
  for (Eigen::Index a = red.dim_v(); a < v.size(); ++a) v[a] = fiber * nd(rng);
  return v;
}

inline Vector random_unit(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vector v(n);
  for (auto& x : v) x = nd(rng);
  return v.normalized();
}

// Critical points of a time-independent H on the standard torus T^2: local
// minima of |grad H|^2 on a dense grid, refined by Newton on grad H.
inline std::vector<Vector> grid_critical_points(const TrigHamiltonian& h, int n = 96) {
  const double t0[] = {0.0};
  auto g2 = [&](int i, int j) {
    const double x[] = {static_cast<double>((i % n + n) % n) / n, static_cast<double>((j % n + n) % n) / n};
    return h.grad_x(t0, x).squaredNorm();
  };
  std::vector<Vector> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double c = g2(i, j);
      bool local_min = true;
      for (int di = -1; di <= 1 && local_min; ++di)
        for (int dj = -1; dj <= 1; ++dj)
          if ((di || dj) && g2(i + di, j + dj) < c) {
            local_min = false;
            break;
          }
      if (!local_min) continue;
      Vector x(2);
      x << static_cast<double>(i) / n, static_cast<double>(j) / n;
      for (int it = 0; it < 200; ++it) {
        const std::span<const double> xs(x.data(), 2);
        const Vector g = h.grad_x(t0, xs);
        if (g.norm() < 1e-15) break;
        x -= h.hess_x(t0, xs).completeOrthogonalDecomposition().solve(g);
      }
      for (auto& v : x) v -= std::floor(v + 1e-9);
      const LatticeTorus lat = LatticeTorus::standard(2);
      bool dup = false;
      for (const Vector& y : out) dup = dup || lat.torus_distance(x, y) < 1e-6;
      if (!dup) out.push_back(x);
    }
  return out;
}

}  // namespace cliffpen::testing
