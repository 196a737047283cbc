#include "cliffpen/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cliffpen {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

LatticeTorus LatticeTorus::from_basis(Matrix basis) {
  if (basis.rows() != basis.cols() || basis.rows() == 0)
    throw FieldError("lattice basis must be square");
  Eigen::JacobiSVD<Matrix> svd(basis);
  const auto& s = svd.singularValues();
  if (!(s(s.size() - 1) > 1e-12 * s(0))) throw FieldError("lattice basis is singular");
  LatticeTorus l;
  l.inverse_ = basis.inverse();
  l.basis_ = std::move(basis);
  l.inverse_norm_ = 1.0 / s(s.size() - 1);
  return l;
}

Vector LatticeTorus::reduce(const Vector& x) const {
  Vector u = inverse_ * x;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    u(i) -= std::floor(u(i));
    if (u(i) >= 1.0 - 1e-12) u(i) = 0.0;
  }
  return u;
}

double LatticeTorus::torus_distance(const Vector& x, const Vector& y) const {
  Vector u = inverse_ * (x - y);
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) -= std::floor(u(i) + 0.5);
  return (basis_ * u).norm();
}

TrigHamiltonian::TrigHamiltonian(int time_rank, int space_dim, std::vector<TrigTerm> terms,
                                 LatticeTorus lattice)
    : time_rank_(time_rank), space_dim_(space_dim), terms_(std::move(terms)),
      lattice_(std::move(lattice)) {
  if (lattice_.dim() != space_dim_) throw FieldError("lattice dimension differs from space_dim");
  for (const TrigTerm& t : terms_)
    if (static_cast<int>(t.m.size()) != time_rank_ || static_cast<int>(t.n.size()) != space_dim_)
      throw FieldError("Hamiltonian term has wrong mode lengths");
}

TrigHamiltonian::TrigHamiltonian(int time_rank, int space_dim, std::vector<TrigTerm> terms)
    : TrigHamiltonian(time_rank, space_dim, std::move(terms), LatticeTorus::standard(space_dim)) {}

namespace {

double phase(const TrigTerm& term, std::span<const double> t, const Vector& y) {
  double p = 0.0;
  for (std::size_t a = 0; a < term.m.size(); ++a) p += term.m[a] * t[a];
  for (std::size_t a = 0; a < term.n.size(); ++a) p += term.n[a] * y(a);
  return kTwoPi * p;
}

Vector as_vector(std::span<const double> x) {
  return Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
}

}  // namespace

double TrigHamiltonian::eval(std::span<const double> t, std::span<const double> x) const {
  const Vector y = lattice_.inverse() * as_vector(x);
  double v = 0.0;
  for (const TrigTerm& term : terms_) {
    const double th = phase(term, t, y);
    v += term.cos_coeff * std::cos(th) + term.sin_coeff * std::sin(th);
  }
  return v;
}

Vector TrigHamiltonian::grad_x(std::span<const double> t, std::span<const double> x) const {
  const Vector y = lattice_.inverse() * as_vector(x);
  Vector g = Vector::Zero(space_dim_);
  for (const TrigTerm& term : terms_) {
    const double th = phase(term, t, y);
    const double w = kTwoPi * (-term.cos_coeff * std::sin(th) + term.sin_coeff * std::cos(th));
    for (int a = 0; a < space_dim_; ++a) g(a) += w * term.n[a];
  }
  return lattice_.inverse().transpose() * g;
}

Matrix TrigHamiltonian::hess_x(std::span<const double> t, std::span<const double> x) const {
  const Vector y = lattice_.inverse() * as_vector(x);
  Matrix h = Matrix::Zero(space_dim_, space_dim_);
  for (const TrigTerm& term : terms_) {
    const double th = phase(term, t, y);
    const double w =
        kTwoPi * kTwoPi * (-term.cos_coeff * std::cos(th) - term.sin_coeff * std::sin(th));
    for (int a = 0; a < space_dim_; ++a)
      for (int b = 0; b < space_dim_; ++b) h(a, b) += w * term.n[a] * term.n[b];
  }
  return lattice_.inverse().transpose() * h * lattice_.inverse();
}

SupNorms TrigHamiltonian::sup_norms() const {
  SupNorms s;
  for (const TrigTerm& term : terms_) {
    const double amp = std::hypot(term.cos_coeff, term.sin_coeff);
    double n2 = 0.0;
    for (int v : term.n) n2 += static_cast<double>(v) * v;
    const double freq = kTwoPi * std::sqrt(n2) * lattice_.inverse_norm();
    s.h_inf += amp;
    s.grad_inf += amp * freq;
    s.hess_inf += amp * freq * freq;
  }
  return s;
}

int TrigHamiltonian::space_bandwidth() const {
  int b = 0;
  for (const TrigTerm& term : terms_) {
    int l1 = 0;
    for (int v : term.n) l1 += std::abs(v);
    b = std::max(b, l1);
  }
  return b;
}

int TrigHamiltonian::time_bandwidth() const {
  int b = 0;
  for (const TrigTerm& term : terms_)
    for (int v : term.m) b = std::max(b, std::abs(v));
  return b;
}

bool TrigHamiltonian::depends_on_space() const {
  for (const TrigTerm& term : terms_) {
    if (term.cos_coeff == 0.0 && term.sin_coeff == 0.0) continue;
    for (int v : term.n)
      if (v != 0) return true;
  }
  return false;
}

bool TrigHamiltonian::depends_on_time() const {
  for (const TrigTerm& term : terms_) {
    if (term.cos_coeff == 0.0 && term.sin_coeff == 0.0) continue;
    for (int v : term.m)
      if (v != 0) return true;
  }
  return false;
}

void TrigHamiltonian::eval_on_grid(const SpectralGrid& grid, const std::vector<double>& f,
                                   double* value, double* grad, double* hess) const {
  if (grid.rank() != time_rank_) throw FieldError("grid rank differs from Hamiltonian time rank");
  const int d = space_dim_;
  const std::size_t npts = grid.size();
  if (f.size() != npts * d) throw FieldError("grid field size mismatch");
  const bool identity_lattice = lattice_.basis().isIdentity(0.0);
  const Matrix& linv = lattice_.inverse();
  const auto& coords = grid.coordinates();
  const int r = time_rank_;

  std::vector<double> y(d), gy(d), hy(static_cast<std::size_t>(d) * d);
  for (std::size_t p = 0; p < npts; ++p) {
    const double* xp = f.data() + p * d;
    if (identity_lattice) {
      std::copy(xp, xp + d, y.begin());
    } else {
      for (int a = 0; a < d; ++a) {
        double s = 0.0;
        for (int b = 0; b < d; ++b) s += linv(a, b) * xp[b];
        y[a] = s;
      }
    }
    double v = 0.0;
    std::fill(gy.begin(), gy.end(), 0.0);
    std::fill(hy.begin(), hy.end(), 0.0);
    for (const TrigTerm& term : terms_) {
      double ph = 0.0;
      for (int a = 0; a < r; ++a) ph += term.m[a] * coords[p * r + a];
      for (int a = 0; a < d; ++a) ph += term.n[a] * y[a];
      const double th = kTwoPi * ph;
      const double c = std::cos(th), s = std::sin(th);
      v += term.cos_coeff * c + term.sin_coeff * s;
      if (grad) {
        const double w = kTwoPi * (-term.cos_coeff * s + term.sin_coeff * c);
        for (int a = 0; a < d; ++a) gy[a] += w * term.n[a];
      }
      if (hess) {
        const double w = kTwoPi * kTwoPi * (-term.cos_coeff * c - term.sin_coeff * s);
        for (int a = 0; a < d; ++a) {
          if (term.n[a] == 0) continue;
          for (int b = 0; b < d; ++b) hy[a * d + b] += w * term.n[a] * term.n[b];
        }
      }
    }
    if (value) value[p] = v;
    if (grad) {
      double* gp = grad + p * d;
      if (identity_lattice) {
        std::copy(gy.begin(), gy.end(), gp);
      } else {
        for (int a = 0; a < d; ++a) {
          double s = 0.0;
          for (int b = 0; b < d; ++b) s += linv(b, a) * gy[b];
          gp[a] = s;
        }
      }
    }
    if (hess) {
      double* hp = hess + p * d * d;
      if (identity_lattice) {
        std::copy(hy.begin(), hy.end(), hp);
      } else {
        const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
            hm(hy.data(), d, d);
        const Matrix full = linv.transpose() * hm * linv;
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) hp[a * d + b] = full(a, b);
      }
    }
  }
}

int required_grid_points(int cutoff, const TrigHamiltonian& h) {
  const int k = cutoff;
  return std::max(2 * (k + k * h.space_bandwidth() + h.time_bandwidth()) + 1, 4 * k + 1);
}

FourierField nabla_h_field(const FourierField& f, const TrigHamiltonian& h, int grid_points) {
  if (f.rank() != h.time_rank() || f.dim_v() != h.space_dim())
    throw FieldError("field shape differs from Hamiltonian");
  const int need = required_grid_points(f.cutoff(), h);
  if (grid_points == 0) grid_points = need;
  if (grid_points < need)
    throw FieldError("grid of " + std::to_string(grid_points) + " points per axis is below the " +
                     std::to_string(need) + " needed for dealiased composition");
  const SpectralGrid grid(f.rank(), grid_points);
  const std::vector<double> values = grid.synthesize(f);
  std::vector<double> grad(values.size());
  h.eval_on_grid(grid, values, nullptr, grad.data(), nullptr);
  return grid.analyze(grad, f.dim_v(), f.mode_set());
}

double action(const FourierField& f, const TrigHamiltonian& h, const Frame& frame,
              const CliffordModule& module, int grid_points) {
  FourierField phi = f;
  phi.set_mean(Vector::Zero(f.dim_v()));
  const double quad = 0.5 * l2_inner(apply_dirac(phi, frame, module), phi);
  if (h.terms().empty()) return quad;
  const int need = required_grid_points(f.cutoff(), h);
  if (grid_points == 0) grid_points = need;
  if (grid_points < need) throw FieldError("grid too small for action quadrature");
  const SpectralGrid grid(f.rank(), grid_points);
  const std::vector<double> values = grid.synthesize(f);
  std::vector<double> hv(grid.size());
  h.eval_on_grid(grid, values, hv.data(), nullptr, nullptr);
  double mean = 0.0;
  for (double v : hv) mean += v;
  return quad - mean / static_cast<double>(grid.size());
}

}  // namespace cliffpen
