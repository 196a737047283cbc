#pragma once

// Truncated Fourier fields f: T^r -> V on the unit-period torus and the
// Dirac-type operator of a constant frame.
//
// A field stores complex coefficients c_k for the zero mode and the
// half-lattice {k : |k|_inf <= K, first nonzero entry of k positive}; the
// coefficient of -k is conj(c_k), so every stored field is real-valued. The
// volume of T^r is 1, so the L2 product is
//   <f, g> = Re(c_0 . d_0) + 2 sum_{k > 0} Re(conj(c_k) . d_k).

#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cliffpen/clifford.hpp"

namespace cliffpen {

using cplx = std::complex<double>;

class FieldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModeSet {
 public:
  static std::shared_ptr<const ModeSet> make(int rank, int cutoff);

  int rank() const { return rank_; }
  int cutoff() const { return cutoff_; }
  std::size_t size() const { return count_; }
  std::span<const int> k(std::size_t i) const {
    return {modes_.data() + i * static_cast<std::size_t>(rank_), static_cast<std::size_t>(rank_)};
  }
  // Position of +k and -k in the full box [-K, K]^r (axis 0 slowest).
  std::size_t box_index(std::size_t i) const { return box_pos_[i]; }
  std::size_t box_index_neg(std::size_t i) const { return box_neg_[i]; }
  std::size_t box_size() const { return box_size_; }
  std::optional<std::size_t> find(std::span<const int> k) const;

 private:
  ModeSet(int rank, int cutoff);
  int rank_;
  int cutoff_;
  std::size_t count_ = 0;
  std::size_t box_size_ = 0;
  std::vector<int> modes_;
  std::vector<std::size_t> box_pos_, box_neg_;
  std::vector<long> lookup_;  // box index -> mode index or -1
};

// Constant frame on T^r: column l of the matrix holds the coefficients of v_l.
class Frame {
 public:
  static Frame from_matrix(Matrix a);
  static Frame identity(int r) { return from_matrix(Matrix::Identity(r, r)); }

  int rank() const { return static_cast<int>(a_.rows()); }
  const Matrix& matrix() const { return a_; }
  double sigma_min() const { return sigma_min_; }
  // lambda_l = <k, v_l>, i.e. A^T k.
  Vector symbol(std::span<const int> k) const;

 private:
  Matrix a_;
  double sigma_min_ = 0.0;
};

class FourierField {
 public:
  FourierField() = default;
  FourierField(std::shared_ptr<const ModeSet> modes, int dim_v);

  const ModeSet& modes() const { return *modes_; }
  const std::shared_ptr<const ModeSet>& mode_set() const { return modes_; }
  int rank() const { return modes_->rank(); }
  int cutoff() const { return modes_->cutoff(); }
  int dim_v() const { return dim_v_; }

  std::span<cplx> mode(std::size_t i) {
    return {coeffs_.data() + i * static_cast<std::size_t>(dim_v_), static_cast<std::size_t>(dim_v_)};
  }
  std::span<const cplx> mode(std::size_t i) const {
    return {coeffs_.data() + i * static_cast<std::size_t>(dim_v_), static_cast<std::size_t>(dim_v_)};
  }
  std::span<cplx> coeffs() { return coeffs_; }
  std::span<const cplx> coeffs() const { return coeffs_; }

  // Mean value (real part of the zero mode).
  Vector mean() const;
  void set_mean(const Vector& x);

  FourierField& operator+=(const FourierField& o);
  FourierField& operator-=(const FourierField& o);
  FourierField& operator*=(double s);
  void axpy(double a, const FourierField& x);
  friend FourierField operator+(FourierField a, const FourierField& b) { return a += b; }
  friend FourierField operator-(FourierField a, const FourierField& b) { return a -= b; }
  friend FourierField operator*(double s, FourierField a) { return a *= s; }

  // Point value at t (direct summation, for tests and diagnostics).
  Vector value_at(std::span<const double> t) const;

  // Max |Im c_0|: the only place the reality constraint is not structural.
  double zero_mode_imag() const;

 private:
  std::shared_ptr<const ModeSet> modes_;
  int dim_v_ = 0;
  std::vector<cplx> coeffs_;
};

void require_same_shape(const FourierField& a, const FourierField& b);

double l2_inner(const FourierField& f, const FourierField& g);
double l2_norm(const FourierField& f);

/// Each mode multiplied by 2 pi i <k, v>.
FourierField lie_derivative(const FourierField& f, std::span<const double> v);

/// Real symbol sigma_k = sum_l <k, v_l> J_l.
Matrix mode_symbol(std::span<const int> k, const Frame& frame, const CliffordModule& module);

/// Fourier multiplier of the Dirac operator on mode k: 2 pi i sigma_k (Hermitian).
Eigen::MatrixXcd mode_operator(std::span<const int> k, const Frame& frame,
                               const CliffordModule& module);

/// Dirac operator sum_l J_l L_{v_l}, mode by mode.
FourierField apply_dirac(const FourierField& f, const Frame& frame, const CliffordModule& module);

struct SpectrumEntry {
  double value;
  int multiplicity;
};

/// Eigenvalues +-2 pi |A^T k| with multiplicity dim_v / 2 each (0 with
/// multiplicity dim_v at k = 0). Requires a Clifford module.
std::vector<SpectrumEntry> mode_spectrum(std::span<const int> k, const Frame& frame,
                                         const CliffordModule& module);

/// Sorted eigenvalues of the Hermitian multiplier by dense decomposition.
Vector mode_spectrum_dense(std::span<const int> k, const Frame& frame, const CliffordModule& module);

struct RegularityReport {
  bool regular = false;
  double gap = 0.0;              // 2 pi min_{0 < |k|_inf <= K} |A^T k|
  double certified_bound = 0.0;  // 2 pi sigma_min(A)
  std::vector<int> argmin;
};

RegularityReport regularity_gap(const Frame& frame, const CliffordModule& module, int k_max);

}  // namespace cliffpen
