#include "cliffpen/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "cliffpen/kernels.hpp"

namespace cliffpen {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool same_level(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

std::vector<double> magnitudes(const ModeSet& modes, const Frame& frame) {
  std::vector<double> mag(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) mag[i] = kTwoPi * frame.symbol(modes.k(i)).norm();
  return mag;
}

double certified_limit(const Frame& frame, int cutoff) {
  return kTwoPi * frame.sigma_min() * (cutoff + 1);
}

}  // namespace

std::vector<double> mode_ladder(const Frame& frame, int cutoff) {
  auto modes = ModeSet::make(frame.rank(), cutoff);
  std::vector<double> mag = magnitudes(*modes, frame);
  std::sort(mag.begin(), mag.end());
  const double limit = certified_limit(frame, cutoff);
  std::vector<double> out;
  for (double m : mag) {
    if (m > limit * (1 + 1e-12)) break;
    if (out.empty() || !same_level(out.back(), m)) out.push_back(m);
  }
  return out;
}

Truncation make_truncation(const Frame& frame, int cutoff, double threshold, double hess_inf) {
  if (!(threshold >= 0.0)) throw ReductionError("truncation threshold must be non-negative");
  Truncation t;
  t.threshold = threshold;
  t.hess_inf = hess_inf;
  t.modes = ModeSet::make(frame.rank(), cutoff);
  t.magnitude = magnitudes(*t.modes, frame);
  t.retained.assign(t.modes->size(), 0);
  double next = std::numeric_limits<double>::infinity();
  const double tie = threshold * (1 + 1e-12) + 1e-300;
  for (std::size_t i = 0; i < t.modes->size(); ++i) {
    if (i == 0 || t.magnitude[i] <= tie) {
      t.retained[i] = 1;
      if (i) ++t.retained_modes;
    } else {
      ++t.excluded_modes;
      next = std::min(next, t.magnitude[i]);
    }
  }
  const double limit = certified_limit(frame, cutoff);
  if (!std::isfinite(next) || next > limit * (1 + 1e-12))
    throw ReductionError("working cutoff K=" + std::to_string(cutoff) +
                         " too small to certify the excluded gap above N=" +
                         std::to_string(threshold));
  t.excluded_gap = next;
  t.q = hess_inf / next;
  return t;
}

Truncation choose_truncation(const TrigHamiltonian& h, const Frame& frame,
                             const CliffordModule& module, int cutoff, double q_max) {
  if (h.time_rank() != frame.rank() || h.space_dim() != module.dim_v)
    throw ReductionError("Hamiltonian shape differs from frame and module");
  const double hess_inf = h.sup_norms().hess_inf;
  const std::vector<double> ladder = mode_ladder(frame, cutoff);
  for (std::size_t i = 0; i + 1 < ladder.size(); ++i) {
    if (hess_inf <= q_max * ladder[i + 1]) return make_truncation(frame, cutoff, ladder[i], hess_inf);
  }
  throw ReductionError("working cutoff K=" + std::to_string(cutoff) +
                       " too small to reach contraction factor " + std::to_string(q_max) +
                       " (sup |Hess H| = " + std::to_string(hess_inf) + ")");
}

Reduction::Reduction(CliffordModule module, Frame frame, TrigHamiltonian hamiltonian,
                     Truncation trunc, ReductionOptions opts)
    : module_(std::move(module)),
      frame_(std::move(frame)),
      h_(std::move(hamiltonian)),
      trunc_(std::move(trunc)),
      opts_(opts),
      grid_(frame_.rank(), opts.grid_points ? opts.grid_points
                                            : required_grid_points(trunc_.cutoff(), h_)) {
  if (!verify_module(module_).ok()) throw ReductionError("module is not Clifford");
  if (!module_.metric.isIdentity(1e-12))
    throw ReductionError("reduction expects an orthonormal module (use to_standard_metric)");
  if (module_.rank != frame_.rank()) throw ReductionError("frame rank differs from module rank");
  if (h_.time_rank() != frame_.rank() || h_.space_dim() != module_.dim_v)
    throw ReductionError("Hamiltonian shape differs from frame and module");
  if (trunc_.modes->rank() != frame_.rank()) throw ReductionError("truncation rank mismatch");
  const int need = required_grid_points(trunc_.cutoff(), h_);
  if (grid_.points_per_axis() < need)
    throw ReductionError("grid of " + std::to_string(grid_.points_per_axis()) +
                         " points per axis is below the " + std::to_string(need) + " required");
  const ModeSet& ms = *trunc_.modes;
  sigma_.reserve(ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    sigma_.push_back(mode_symbol(ms.k(i), frame_, module_));
    if (i == 0) continue;
    (trunc_.retained[i] ? retained_ : excluded_).push_back(i);
  }
}

void Reduction::require_contraction() const {
  if (!(trunc_.q < 1.0))
    throw ReductionError("fiber map is not a contraction (q = " + std::to_string(trunc_.q) + ")");
}

FourierField Reduction::dirac(const FourierField& f) const {
  const int d = dim_v();
  FourierField out(f.mode_set(), d);
  for (std::size_t i = 1; i < f.modes().size(); ++i) {
    const auto c = f.mode(i);
    auto o = out.mode(i);
    const Matrix& s = sigma_[i];
    for (int a = 0; a < d; ++a) {
      cplx acc = 0.0;
      for (int b = 0; b < d; ++b) acc += s(a, b) * c[b];
      o[a] = cplx(0.0, kTwoPi) * acc;
    }
  }
  return out;
}

FourierField Reduction::inverse_dirac_excluded(const FourierField& f) const {
  const int d = dim_v();
  FourierField out(f.mode_set(), d);
  for (std::size_t i : excluded_) {
    const auto c = f.mode(i);
    auto o = out.mode(i);
    const Matrix& s = sigma_[i];
    const double m = trunc_.magnitude[i];
    const cplx scale(0.0, kTwoPi / (m * m));
    for (int a = 0; a < d; ++a) {
      cplx acc = 0.0;
      for (int b = 0; b < d; ++b) acc += s(a, b) * c[b];
      o[a] = scale * acc;
    }
  }
  return out;
}

void Reduction::keep_retained(FourierField& f) const {
  for (std::size_t i : excluded_)
    for (cplx& c : f.mode(i)) c = 0.0;
  for (cplx& c : f.mode(0)) c = c.real();
}

void Reduction::keep_excluded(FourierField& f) const {
  for (cplx& c : f.mode(0)) c = 0.0;
  for (std::size_t i : retained_)
    for (cplx& c : f.mode(i)) c = 0.0;
}

FiberSolution Reduction::solve_fiber(const FourierField& g_in) const {
  require_contraction();
  FourierField g = g_in;
  if (g.mode_set() != trunc_.modes || g.dim_v() != dim_v())
    throw ReductionError("base field does not live on the working modes");
  keep_retained(g);
  FiberSolution sol;
  sol.h = zero_field();
  sol.contraction_q = trunc_.q;
  std::vector<double> values, grad;
  double prev = 0.0;
  for (int it = 1; it <= opts_.max_iter; ++it) {
    grid_.synthesize(g + sol.h, values);
    grad.resize(values.size());
    h_.eval_on_grid(grid_, values, nullptr, grad.data(), nullptr);
    FourierField next = inverse_dirac_excluded(grid_.analyze(grad, dim_v(), trunc_.modes));
    const double delta = l2_norm(next - sol.h);
    if (it > 1 && prev > 0.0) sol.measured_rate = delta / prev;
    prev = delta;
    sol.h = std::move(next);
    sol.iterations = it;
    sol.final_delta = delta;
    if (delta <= opts_.fiber_tol) return sol;
  }
  throw ReductionError("fiber iteration did not converge in " + std::to_string(opts_.max_iter) +
                       " steps (last increment " + std::to_string(prev) + ")");
}

ReducedState Reduction::evaluate(const FourierField& g_in) const {
  ReducedState s;
  s.g = g_in;
  keep_retained(s.g);
  s.fiber = solve_fiber(s.g);
  const FourierField f = s.g + s.fiber.h;
  const int d = dim_v();
  grid_.synthesize(f, s.f_grid);
  const std::size_t npts = grid_.size();
  std::vector<double> value(npts), grad(npts * d);
  s.hess_grid.assign(npts * d * d, 0.0);
  h_.eval_on_grid(grid_, s.f_grid, value.data(), grad.data(), s.hess_grid.data());
  s.grad_h = grid_.analyze(grad, d, trunc_.modes);
  FourierField projected = s.grad_h;
  keep_retained(projected);
  s.grad_phi = dirac(s.g) - projected;
  double mean = 0.0;
  for (double v : value) mean += v;
  s.phi = 0.5 * l2_inner(dirac(f), f) - mean / static_cast<double>(npts);
  return s;
}

FourierField Reduction::multiply_hessian(const ReducedState& s, const FourierField& w) const {
  const int d = dim_v();
  const std::vector<double> wg = grid_.synthesize(w);
  std::vector<double> out(wg.size());
  kernels::active().sym_matvec_field(grid_.size(), d, s.hess_grid.data(), wg.data(), out.data());
  return grid_.analyze(out, d, trunc_.modes);
}

FourierField Reduction::apply_dh(const ReducedState& s, const FourierField& w_in) const {
  require_contraction();
  FourierField w = w_in;
  keep_retained(w);
  const double scale = std::max(l2_norm(w), std::numeric_limits<double>::min());
  FourierField u = inverse_dirac_excluded(multiply_hessian(s, w));
  FourierField sum = u;
  for (int it = 0; it < opts_.max_iter; ++it) {
    if (l2_norm(u) <= opts_.neumann_tol * scale) return sum;
    u = inverse_dirac_excluded(multiply_hessian(s, u));
    sum += u;
  }
  throw ReductionError("Neumann series for Dh did not converge");
}

FourierField Reduction::hess_vec(const ReducedState& s, const FourierField& w_in) const {
  FourierField w = w_in;
  keep_retained(w);
  FourierField mv = multiply_hessian(s, w + apply_dh(s, w));
  keep_retained(mv);
  return dirac(w) - mv;
}

Vector Reduction::pack(const FourierField& f) const {
  const int d = dim_v();
  Vector v(reduced_dim());
  const auto c0 = f.mode(0);
  for (int a = 0; a < d; ++a) v[a] = c0[a].real();
  Eigen::Index pos = d;
  const double r2 = std::sqrt(2.0);
  for (std::size_t i : retained_) {
    const auto c = f.mode(i);
    for (int a = 0; a < d; ++a) v[pos + a] = r2 * c[a].real();
    for (int a = 0; a < d; ++a) v[pos + d + a] = r2 * c[a].imag();
    pos += 2 * d;
  }
  return v;
}

FourierField Reduction::unpack(const Vector& v) const {
  if (v.size() != reduced_dim()) throw ReductionError("reduced coordinate vector has wrong size");
  const int d = dim_v();
  FourierField f = zero_field();
  auto c0 = f.mode(0);
  for (int a = 0; a < d; ++a) c0[a] = v[a];
  Eigen::Index pos = d;
  const double ir2 = 1.0 / std::sqrt(2.0);
  for (std::size_t i : retained_) {
    auto c = f.mode(i);
    for (int a = 0; a < d; ++a) c[a] = cplx(v[pos + a], v[pos + d + a]) * ir2;
    pos += 2 * d;
  }
  return f;
}

Reduction::DenseHessian Reduction::hess_dense(const ReducedState& s) const {
  const int d = dim_v();
  const int n = reduced_dim();
  const int K = trunc_.cutoff();
  const int r = frame_.rank();
  const ModeSet& ms = *trunc_.modes;
  // Coefficients of the Hessian field on the difference box [-2K, 2K]^r.
  const std::vector<cplx> mhat = grid_.analyze_box(s.hess_grid, d * d, 2 * K);
  const int side = 4 * K + 1;
  auto offset_index = [&](std::span<const int> k, std::span<const int> j, int sign) {
    std::size_t idx = 0;
    for (int a = 0; a < r; ++a) idx = idx * side + static_cast<std::size_t>(k[a] - sign * j[a] + 2 * K);
    return idx;
  };
  const std::vector<int> zero(r, 0);

  Matrix hess(n, n);
  FourierField mw = zero_field();
  for (int col = 0; col < n; ++col) {
    Vector e = Vector::Zero(n);
    e[col] = 1.0;
    const FourierField w = unpack(e);
    // Which mode carries the column and its coefficient.
    std::size_t j = 0;
    int comp = col;
    cplx cj = 1.0;
    if (col >= d) {
      const int rel = col - d;
      j = retained_[rel / (2 * d)];
      const int part = rel % (2 * d);
      comp = part % d;
      cj = (part < d ? cplx(1.0, 0.0) : cplx(0.0, 1.0)) / std::sqrt(2.0);
    }
    const std::span<const int> kj = j ? ms.k(j) : std::span<const int>(zero);
    // (M w)_k = mhat_{k-j} c + mhat_{k+j} conj(c), the second term absent for j = 0.
    for (std::size_t i = 0; i < ms.size(); ++i) {
      auto o = mw.mode(i);
      const std::span<const int> ki = i ? ms.k(i) : std::span<const int>(zero);
      const cplx* m1 = &mhat[offset_index(ki, kj, 1) * d * d];
      for (int a = 0; a < d; ++a) o[a] = m1[a * d + comp] * cj;
      if (j) {
        const cplx* m2 = &mhat[offset_index(ki, kj, -1) * d * d];
        const cplx cc = std::conj(cj);
        for (int a = 0; a < d; ++a) o[a] += m2[a * d + comp] * cc;
      }
    }
    const FourierField u0 = inverse_dirac_excluded(mw);
    if (l2_norm(u0) > 1e-15) {
      hess.col(col) = pack(hess_vec(s, w));
    } else {
      keep_retained(mw);
      hess.col(col) = pack(dirac(w) - mw);
    }
  }
  DenseHessian out;
  const double norm = std::max(hess.norm(), std::numeric_limits<double>::min());
  out.asymmetry = (hess - hess.transpose()).norm() / norm;
  out.matrix = 0.5 * (hess + hess.transpose());
  return out;
}

double Reduction::fixed_point_residual(const FourierField& g, const FourierField& h) const {
  const FourierField grad = nabla_h_field(g + h, h_, grid_.points_per_axis());
  return l2_norm(h - inverse_dirac_excluded(grad));
}

double Reduction::lifted_residual(const ReducedState& s) const {
  return l2_norm(dirac(s.g + s.fiber.h) - s.grad_h);
}

FourierField shell_probe(const Reduction& red, const Vector& x, double amplitude,
                         const Vector& direction, double phase) {
  const auto& idx = red.retained_indices();
  if (idx.empty()) throw ReductionError("no retained modes to probe");
  std::size_t top = idx.front();
  for (std::size_t i : idx)
    if (red.truncation().magnitude[i] > red.truncation().magnitude[top] &&
        !same_level(red.truncation().magnitude[i], red.truncation().magnitude[top]))
      top = i;
  FourierField g = red.zero_field();
  g.set_mean(x);
  auto c = g.mode(top);
  const cplx rot = std::polar(0.5 * amplitude, phase);
  for (int a = 0; a < red.dim_v(); ++a) c[a] = rot * direction[a];
  return g;
}

std::vector<LadderRow> ladder_diagnostics(
    const CliffordModule& module, const Frame& frame, const TrigHamiltonian& h, int cutoff,
    double base_threshold, std::span<const double> multipliers,
    const std::function<FourierField(const Reduction&)>& probe, ReductionOptions opts) {
  const double hess_inf = h.sup_norms().hess_inf;
  std::vector<LadderRow> rows;
  for (double m : multipliers) {
    Truncation t;
    try {
      t = make_truncation(frame, cutoff, m * base_threshold, hess_inf);
    } catch (const ReductionError&) {
      continue;
    }
    const Reduction red(module, frame, h, t, opts);
    const FiberSolution sol = red.solve_fiber(probe(red));
    rows.push_back({t.threshold, t.excluded_gap, t.q, l2_norm(sol.h), sol.iterations});
  }
  return rows;
}

double ladder_slope(std::span<const LadderRow> rows) {
  std::vector<double> xs, ys;
  for (const LadderRow& r : rows) {
    if (r.h_norm <= 0.0) continue;
    xs.push_back(std::log(r.excluded_gap));
    ys.push_back(std::log(r.h_norm));
  }
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

LemmaReport lemma_quadratic_diagnostic(const Reduction& red, int directions,
                                       std::span<const double> radii, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  const int d = red.dim_v();
  const int n = red.reduced_dim();
  LemmaReport rep;
  for (double rho : radii) {
    for (int k = 0; k < directions; ++k) {
      Vector u(d);
      for (int a = 0; a < d; ++a) u[a] = uniform(rng);
      const Vector x = red.hamiltonian().lattice().basis() * u;
      Vector dir = Vector::Zero(n);
      for (int a = d; a < n; ++a) dir[a] = normal(rng);
      if (dir.norm() > 0) dir /= dir.norm();
      Vector coords = rho * dir;
      coords.head(d) = x;
      const FourierField g = red.unpack(coords);
      const ReducedState s = red.evaluate(g);
      const FourierField dg = red.dirac(g);
      LemmaSample smp;
      smp.radius = rho;
      smp.abs_r = std::abs(s.phi - 0.5 * l2_inner(dg, g));
      smp.grad_r = l2_norm(s.grad_phi - dg);
      smp.grad_phi0 = l2_norm(dg);
      smp.abs_r0 = std::abs(0.5 * l2_inner(red.dirac(s.fiber.h), s.fiber.h));
      smp.holds = smp.abs_r + smp.grad_r < smp.grad_phi0;
      rep.r0_constant = std::max(rep.r0_constant, smp.abs_r0 * red.truncation().excluded_gap /
                                                      (smp.grad_phi0 + 1.0));
      rep.samples.push_back(smp);
    }
  }
  std::vector<double> sorted(radii.begin(), radii.end());
  std::sort(sorted.begin(), sorted.end());
  for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) {
    const bool all = std::all_of(rep.samples.begin(), rep.samples.end(), [&](const LemmaSample& s) {
      return s.radius != *it || s.holds;
    });
    if (!all) break;
    rep.crossover_found = true;
    rep.crossover = *it;
  }
  return rep;
}

}  // namespace cliffpen
