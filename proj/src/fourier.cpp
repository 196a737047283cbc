#include "cliffpen/fourier.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "cliffpen/kernels.hpp"

namespace cliffpen {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

ModeSet::ModeSet(int rank, int cutoff) : rank_(rank), cutoff_(cutoff) {
  const std::size_t side = 2 * static_cast<std::size_t>(cutoff) + 1;
  box_size_ = 1;
  for (int a = 0; a < rank; ++a) box_size_ *= side;
  lookup_.assign(box_size_, -1);

  auto box_of = [&](const std::vector<int>& k) {
    std::size_t idx = 0;
    for (int a = 0; a < rank; ++a) idx = idx * side + static_cast<std::size_t>(k[a] + cutoff);
    return idx;
  };
  auto push = [&](const std::vector<int>& k) {
    std::vector<int> neg(k);
    for (int& v : neg) v = -v;
    lookup_[box_of(k)] = static_cast<long>(count_);
    modes_.insert(modes_.end(), k.begin(), k.end());
    box_pos_.push_back(box_of(k));
    box_neg_.push_back(box_of(neg));
    ++count_;
  };

  push(std::vector<int>(rank, 0));
  std::vector<int> k(rank, -cutoff);
  for (std::size_t n = 0; n < box_size_; ++n) {
    int first = 0;
    for (int v : k)
      if (v != 0) {
        first = v;
        break;
      }
    if (first > 0) push(k);
    for (int a = rank - 1; a >= 0; --a) {
      if (++k[a] <= cutoff) break;
      k[a] = -cutoff;
    }
  }
}

std::shared_ptr<const ModeSet> ModeSet::make(int rank, int cutoff) {
  if (rank < 1 || cutoff < 0) throw FieldError("mode set needs rank >= 1 and cutoff >= 0");
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const ModeSet>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{rank, cutoff}];
  if (!slot) slot.reset(new ModeSet(rank, cutoff));
  return slot;
}

std::optional<std::size_t> ModeSet::find(std::span<const int> k) const {
  if (static_cast<int>(k.size()) != rank_) return std::nullopt;
  const std::size_t side = 2 * static_cast<std::size_t>(cutoff_) + 1;
  std::size_t idx = 0;
  for (int v : k) {
    if (std::abs(v) > cutoff_) return std::nullopt;
    idx = idx * side + static_cast<std::size_t>(v + cutoff_);
  }
  const long m = lookup_[idx];
  if (m < 0) return std::nullopt;
  return static_cast<std::size_t>(m);
}

Frame Frame::from_matrix(Matrix a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw FieldError("frame matrix must be square");
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  const double norm = s(0);
  const double det = std::abs(a.determinant());
  if (!(det > 1e-12 * std::pow(norm, static_cast<double>(a.rows()))))
    throw FieldError("frame matrix is singular");
  Frame f;
  f.a_ = std::move(a);
  f.sigma_min_ = s(s.size() - 1);
  return f;
}

Vector Frame::symbol(std::span<const int> k) const {
  Vector kv(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) kv(i) = k[i];
  return a_.transpose() * kv;
}

FourierField::FourierField(std::shared_ptr<const ModeSet> modes, int dim_v)
    : modes_(std::move(modes)), dim_v_(dim_v), coeffs_(modes_->size() * dim_v, cplx(0.0, 0.0)) {}

Vector FourierField::mean() const {
  Vector x(dim_v_);
  for (int i = 0; i < dim_v_; ++i) x(i) = coeffs_[i].real();
  return x;
}

void FourierField::set_mean(const Vector& x) {
  for (int i = 0; i < dim_v_; ++i) coeffs_[i] = cplx(x(i), 0.0);
}

void require_same_shape(const FourierField& a, const FourierField& b) {
  if (a.mode_set() != b.mode_set() || a.dim_v() != b.dim_v())
    throw FieldError("field shape mismatch");
}

FourierField& FourierField::operator+=(const FourierField& o) {
  require_same_shape(*this, o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

FourierField& FourierField::operator-=(const FourierField& o) {
  require_same_shape(*this, o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

FourierField& FourierField::operator*=(double s) {
  for (cplx& c : coeffs_) c *= s;
  return *this;
}

void FourierField::axpy(double a, const FourierField& x) {
  require_same_shape(*this, x);
  kernels::active().axpy(2 * coeffs_.size(), a, reinterpret_cast<const double*>(x.coeffs_.data()),
                         reinterpret_cast<double*>(coeffs_.data()));
}

Vector FourierField::value_at(std::span<const double> t) const {
  Vector v = Vector::Zero(dim_v_);
  for (std::size_t i = 0; i < modes_->size(); ++i) {
    double phase = 0.0;
    const auto k = modes_->k(i);
    for (std::size_t a = 0; a < k.size(); ++a) phase += k[a] * t[a];
    const cplx e = std::polar(1.0, kTwoPi * phase);
    const double w = (i == 0) ? 1.0 : 2.0;
    for (int c = 0; c < dim_v_; ++c) v(c) += w * (mode(i)[c] * e).real();
  }
  return v;
}

double FourierField::zero_mode_imag() const {
  double m = 0.0;
  for (int i = 0; i < dim_v_; ++i) m = std::max(m, std::abs(coeffs_[i].imag()));
  return m;
}

double l2_inner(const FourierField& f, const FourierField& g) {
  require_same_shape(f, g);
  const auto& k = kernels::active();
  const std::size_t d = static_cast<std::size_t>(f.dim_v());
  const auto* a = reinterpret_cast<const double*>(f.coeffs().data());
  const auto* b = reinterpret_cast<const double*>(g.coeffs().data());
  const std::size_t total = 2 * f.coeffs().size();
  return k.dot(2 * d, a, b) + 2.0 * k.dot(total - 2 * d, a + 2 * d, b + 2 * d);
}

double l2_norm(const FourierField& f) { return std::sqrt(std::max(0.0, l2_inner(f, f))); }

FourierField lie_derivative(const FourierField& f, std::span<const double> v) {
  if (static_cast<int>(v.size()) != f.rank()) throw FieldError("vector field rank mismatch");
  FourierField out(f.mode_set(), f.dim_v());
  for (std::size_t i = 1; i < f.modes().size(); ++i) {
    const auto k = f.modes().k(i);
    double kv = 0.0;
    for (std::size_t a = 0; a < k.size(); ++a) kv += k[a] * v[a];
    const cplx factor(0.0, kTwoPi * kv);
    auto src = f.mode(i);
    auto dst = out.mode(i);
    for (int c = 0; c < f.dim_v(); ++c) dst[c] = factor * src[c];
  }
  return out;
}

Matrix mode_symbol(std::span<const int> k, const Frame& frame, const CliffordModule& module) {
  if (frame.rank() != module.rank) throw FieldError("frame rank differs from module rank");
  const Vector lambda = frame.symbol(k);
  Matrix sigma = Matrix::Zero(module.dim_v, module.dim_v);
  for (int l = 0; l < module.rank; ++l) sigma += lambda(l) * module.generators[l];
  return sigma;
}

Eigen::MatrixXcd mode_operator(std::span<const int> k, const Frame& frame,
                               const CliffordModule& module) {
  return cplx(0.0, kTwoPi) * mode_symbol(k, frame, module).cast<cplx>();
}

FourierField apply_dirac(const FourierField& f, const Frame& frame, const CliffordModule& module) {
  if (frame.rank() != module.rank || f.rank() != module.rank)
    throw FieldError("frame, module and field ranks must agree");
  if (f.dim_v() != module.dim_v) throw FieldError("field dimension differs from module");
  const int d = f.dim_v();
  FourierField out(f.mode_set(), d);
  for (std::size_t i = 1; i < f.modes().size(); ++i) {
    const Matrix sigma = mode_symbol(f.modes().k(i), frame, module);
    auto src = f.mode(i);
    auto dst = out.mode(i);
    for (int a = 0; a < d; ++a) {
      cplx s(0.0, 0.0);
      for (int b = 0; b < d; ++b) s += sigma(a, b) * src[b];
      dst[a] = cplx(0.0, kTwoPi) * s;
    }
  }
  return out;
}

std::vector<SpectrumEntry> mode_spectrum(std::span<const int> k, const Frame& frame,
                                         const CliffordModule& module) {
  if (frame.rank() != module.rank) throw FieldError("frame rank differs from module rank");
  const double mag = kTwoPi * frame.symbol(k).norm();
  if (mag == 0.0) return {{0.0, module.dim_v}};
  return {{-mag, module.dim_v / 2}, {mag, module.dim_v / 2}};
}

Vector mode_spectrum_dense(std::span<const int> k, const Frame& frame, const CliffordModule& module) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mode_operator(k, frame, module),
                                                     Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

RegularityReport regularity_gap(const Frame& frame, const CliffordModule& module, int k_max) {
  if (frame.rank() != module.rank) throw FieldError("frame rank differs from module rank");
  if (k_max < 1) throw FieldError("regularity search box must have k_max >= 1");
  const auto modes = ModeSet::make(frame.rank(), k_max);
  RegularityReport rep;
  // Constant invertible frame + Clifford module: |A^T k| >= sigma_min |k| > 0 off k = 0.
  rep.regular = verify_module(module).ok() && frame.sigma_min() > 0.0;
  rep.certified_bound = kTwoPi * frame.sigma_min();
  rep.gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < modes->size(); ++i) {
    const double mag = kTwoPi * frame.symbol(modes->k(i)).norm();
    if (mag < rep.gap) {
      rep.gap = mag;
      rep.argmin.assign(modes->k(i).begin(), modes->k(i).end());
    }
  }
  return rep;
}

}  // namespace cliffpen
