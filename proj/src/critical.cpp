#include "cliffpen/critical.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include <Eigen/Eigenvalues>

#include "cliffpen/minres.hpp"

namespace cliffpen {

namespace {

double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base, f = inv, out = 0.0;
  while (i > 0) {
    out += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return out;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

// Absolute-value preconditioner built from the constant-coefficient part of
// the Hessian: block by block |D_k - mean(grad^2 H)|^{-1}.
class BlockPreconditioner {
 public:
  BlockPreconditioner(const Reduction& red, const ReducedState& s) : d_(red.dim_v()) {
    const int d = d_;
    const std::size_t npts = red.grid().size();
    Matrix mbar = Matrix::Zero(d, d);
    for (std::size_t p = 0; p < npts; ++p)
      mbar += Eigen::Map<const Matrix>(s.hess_grid.data() + p * d * d, d, d);
    mbar /= static_cast<double>(npts);
    const double floor = 1e-3 * std::max(1.0, red.truncation().hess_inf);
    {
      Eigen::SelfAdjointEigenSolver<Matrix> es(-mbar);
      Vector inv = es.eigenvalues().cwiseAbs().cwiseMax(floor).cwiseInverse();
      base_ = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
    }
    const double two_pi = 6.283185307179586476925286766559;
    const ModeSet& ms = red.truncation().modes.operator*();
    for (std::size_t i : red.retained_indices()) {
      const Matrix sigma = mode_symbol(ms.k(i), red.frame(), red.module());
      Eigen::MatrixXcd b = Eigen::MatrixXcd(sigma.cast<std::complex<double>>()) *
                           std::complex<double>(0.0, two_pi);
      b -= mbar.cast<std::complex<double>>();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b);
      Vector inv = es.eigenvalues().cwiseAbs().cwiseMax(floor).cwiseInverse();
      Eigen::MatrixXcd a = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
      Matrix real(2 * d, 2 * d);
      real << a.real(), -a.imag(), a.imag(), a.real();
      blocks_.push_back(std::move(real));
    }
  }

  Vector operator()(const Vector& v) const {
    Vector out(v.size());
    out.head(d_) = base_ * v.head(d_);
    Eigen::Index pos = d_;
    for (const Matrix& b : blocks_) {
      out.segment(pos, 2 * d_) = b * v.segment(pos, 2 * d_);
      pos += 2 * d_;
    }
    return out;
  }

 private:
  int d_;
  Matrix base_;
  std::vector<Matrix> blocks_;
};

struct Direction {
  Vector newton;
  Matrix dense;  // empty unless the dense route was used
};

Direction newton_direction(const Reduction& red, const ReducedState& s, const Vector& grad,
                           double residual, const SearchOptions& opts) {
  Direction dir;
  if (red.reduced_dim() <= opts.dense_limit) {
    dir.dense = red.hess_dense(s).matrix;
    Eigen::SelfAdjointEigenSolver<Matrix> es(dir.dense);
    const Vector& ev = es.eigenvalues();
    const double cut = 1e-14 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    Vector coef = es.eigenvectors().transpose() * grad;
    for (Eigen::Index i = 0; i < ev.size(); ++i) coef[i] = std::abs(ev[i]) > cut ? -coef[i] / ev[i] : 0.0;
    dir.newton = es.eigenvectors() * coef;
    return dir;
  }
  const BlockPreconditioner prec(red, s);
  auto op = [&](const Vector& v) { return red.pack(red.hess_vec(s, red.unpack(v))); };
  const double rtol = std::clamp(residual, 1e-12, 1e-3);
  dir.newton = minres(op, prec, Vector(-grad), rtol, 400).x;
  return dir;
}

Vector hess_times(const Reduction& red, const ReducedState& s, const Direction& dir,
                  const Vector& v) {
  if (dir.dense.size()) return dir.dense * v;
  return red.pack(red.hess_vec(s, red.unpack(v)));
}

}  // namespace

NewtonResult newton_solve(const Reduction& red, const FourierField& g0, const SearchOptions& opts) {
  NewtonResult out;
  Vector x = red.pack(g0);
  ReducedState s = red.evaluate(red.unpack(x));
  Vector grad = red.pack(s.grad_phi);
  double res = grad.norm();
  // Past the tolerance, full Newton steps continue while they still reduce
  // the residual; near degenerate points this pulls duplicates together.
  for (int it = 1; it <= opts.max_iter; ++it) {
    const Direction dir = newton_direction(red, s, grad, res, opts);
    bool accepted = false;
    auto try_along = [&](Vector step, double alpha0, int tries) {
      const double len = step.norm();
      if (!(len > 0.0) || !std::isfinite(len)) return false;
      if (len * alpha0 > 0.5) alpha0 = 0.5 / len;
      double alpha = alpha0;
      for (int k = 0; k < tries; ++k, alpha *= 0.5) {
        const Vector xn = x + alpha * step;
        ReducedState sn = red.evaluate(red.unpack(xn));
        const Vector gn = red.pack(sn.grad_phi);
        const double rn = gn.norm();
        const bool ok = res <= opts.grad_tol ? rn < res : rn < (1.0 - 1e-4 * alpha / alpha0) * res;
        if (ok) {
          x = xn;
          s = std::move(sn);
          grad = gn;
          res = rn;
          return true;
        }
        if (res <= opts.grad_tol) return false;  // polishing takes full steps only
      }
      return false;
    };
    accepted = try_along(dir.newton, 1.0, 30);
    if (!accepted && res > opts.grad_tol) {
      // Steepest descent on |grad Phi|^2 / 2 with the exact line minimiser of its model.
      const Vector d = -hess_times(red, s, dir, grad);
      const Vector hd = hess_times(red, s, dir, d);
      const double hd2 = hd.squaredNorm();
      if (hd2 > 0.0) accepted = try_along(d, d.squaredNorm() / hd2, 30);
    }
    out.iterations = it;
    if (!accepted) break;
  }
  out.g = red.unpack(x);
  out.residual = res;
  out.converged = res <= opts.grad_tol;
  return out;
}

std::vector<FourierField> search_starts(const Reduction& red, const SearchOptions& opts) {
  const int d = red.dim_v();
  const int n = red.reduced_dim();
  if (d > static_cast<int>(std::size(kPrimes))) throw SearchError("dimension too large for Halton starts");
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  const Matrix& basis = red.hamiltonian().lattice().basis();
  std::vector<FourierField> out;
  for (int i = 0; i < opts.starts; ++i) {
    Vector u(d);
    for (int a = 0; a < d; ++a) u[a] = radical_inverse(static_cast<std::uint64_t>(i) + 1, kPrimes[a]);
    Vector coords = Vector::Zero(n);
    coords.head(d) = basis * u;
    if (n > d && opts.fiber_radius > 0.0) {
      Vector dir(n - d);
      for (Eigen::Index a = 0; a < dir.size(); ++a) dir[a] = normal(rng);
      coords.tail(n - d) = dir.normalized() * (opts.fiber_radius * uniform(rng));
    }
    out.push_back(red.unpack(coords));
  }
  return out;
}

CriticalRecord make_record(const Reduction& red, const FourierField& g_in) {
  const LatticeTorus& lat = red.hamiltonian().lattice();
  CriticalRecord rec;
  rec.x = lat.reduce(g_in.mean());
  rec.g = g_in;
  rec.g.set_mean(lat.basis() * rec.x);
  const ReducedState s = red.evaluate(rec.g);
  rec.g = s.g;
  rec.h = s.fiber.h;
  rec.phi = s.phi;
  rec.residual = red.pack(s.grad_phi).norm();
  rec.lifted_residual = red.lifted_residual(s);
  return rec;
}

void classify(const Reduction::DenseHessian& hess, CriticalRecord& rec, double degeneracy_rel) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(hess.matrix, Eigen::EigenvaluesOnly);
  const Vector ev = es.eigenvalues();
  rec.hess_norm = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
  rec.margin = ev.size() ? ev.cwiseAbs().minCoeff() : 0.0;
  const double tol = degeneracy_rel * rec.hess_norm;
  rec.signature = {0, 0, 0};
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > tol) ++rec.signature[0];
    else if (ev[i] < -tol) ++rec.signature[1];
    else ++rec.signature[2];
  }
  rec.nondegenerate = rec.hess_norm > 0.0 && rec.margin > tol;
  rec.classified = true;
}

void classify(const Reduction& red, CriticalRecord& rec, double degeneracy_rel) {
  classify(red.hess_dense(red.evaluate(rec.g)), rec, degeneracy_rel);
}

std::vector<CriticalRecord> dedup(const Reduction& red, std::vector<CriticalRecord> records,
                                  double tol) {
  const LatticeTorus& lat = red.hamiltonian().lattice();
  std::stable_sort(records.begin(), records.end(),
                   [](const CriticalRecord& a, const CriticalRecord& b) { return a.residual < b.residual; });
  auto fiber = [](const CriticalRecord& r) {
    FourierField f = r.g;
    f.set_mean(Vector::Zero(f.dim_v()));
    return f;
  };
  std::vector<CriticalRecord> kept;
  for (CriticalRecord& r : records) {
    const FourierField fr = fiber(r);
    bool duplicate = false;
    for (const CriticalRecord& k : kept) {
      const double dist = lat.torus_distance(lat.basis() * r.x, lat.basis() * k.x) +
                          l2_norm(fr - fiber(k));
      if (dist <= tol) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) kept.push_back(std::move(r));
  }
  std::sort(kept.begin(), kept.end(), [](const CriticalRecord& a, const CriticalRecord& b) {
    if (a.phi != b.phi) return a.phi < b.phi;
    return std::lexicographical_compare(a.x.begin(), a.x.end(), b.x.begin(), b.x.end());
  });
  return kept;
}

SearchResult find_critical_points(const Reduction& red, const SearchOptions& opts) {
  SearchResult result;
  if (!red.hamiltonian().depends_on_space()) {
    result.degenerate_continuum = true;
    return result;
  }
  if (opts.starts < 1) throw SearchError("search budget must allow at least one start");
  const std::vector<FourierField> starts = search_starts(red, opts);
  std::vector<std::optional<CriticalRecord>> found(starts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < starts.size();) {
      const NewtonResult nr = newton_solve(red, starts[i], opts);
      if (nr.converged) {
        CriticalRecord rec = make_record(red, nr.g);
        rec.iterations = nr.iterations;
        found[i] = std::move(rec);
      }
    }
  };
  unsigned threads = opts.threads > 0 ? static_cast<unsigned>(opts.threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(starts.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  std::vector<CriticalRecord> converged;
  for (auto& f : found) {
    if (f) {
      ++result.converged_starts;
      converged.push_back(std::move(*f));
    } else {
      ++result.failed_starts;
    }
  }
  if (converged.empty())
    throw SearchError("search budget exhausted: none of " + std::to_string(starts.size()) +
                      " starts converged");
  result.records = dedup(red, std::move(converged), opts.dedup_tol);
  if (opts.classify)
    for (CriticalRecord& r : result.records) classify(red, r, opts.degeneracy_rel);
  return result;
}

ArnoldBounds arnold_bounds(int d, const std::string& manifold) {
  if (manifold != "torus") throw SearchError("Arnold bounds are implemented for tori only, got " + manifold);
  if (d < 1 || d > 30) throw SearchError("torus dimension out of range");
  return {1 << d, d + 1};
}

TheoremVerdict verify_theorem(const std::vector<CriticalRecord>& records, bool h_nondegenerate,
                              int d) {
  const ArnoldBounds b = arnold_bounds(d);
  TheoremVerdict v;
  v.count = static_cast<int>(records.size());
  v.all_nondegenerate = !records.empty() &&
                        std::all_of(records.begin(), records.end(), [](const CriticalRecord& r) {
                          return r.classified && r.nondegenerate;
                        });
  const bool use_sb = v.all_nondegenerate && h_nondegenerate;
  v.bound = use_sb ? "SB" : "CL+1";
  v.required = use_sb ? b.sum_betti : b.cup_length_plus_1;
  for (const CriticalRecord& r : records) v.max_lifted_residual = std::max(v.max_lifted_residual, r.lifted_residual);
  v.pass = v.count >= v.required;
  v.label = v.pass ? "PASS" : "SHORTFALL (search shortfall, not a theorem violation)";
  return v;
}

}  // namespace cliffpen
