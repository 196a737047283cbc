#pragma once

// Hamiltonians H: T^r x W -> R, W = V / L Z^d, as real trigonometric
// polynomials
//   H(t, x) = sum c cos(theta) + s sin(theta),  theta = 2 pi (m . t + n . L^{-1} x).
// Derivatives are exact; gradients and Hessians are taken along W in the
// standard inner product of V.

#include <span>
#include <vector>

#include "cliffpen/fourier.hpp"
#include "cliffpen/spectral_grid.hpp"

namespace cliffpen {

struct TrigTerm {
  std::vector<int> m;  // time mode, length r
  std::vector<int> n;  // space mode in lattice coordinates, length d
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;

  bool operator==(const TrigTerm&) const = default;
};

class LatticeTorus {
 public:
  static LatticeTorus from_basis(Matrix basis);
  static LatticeTorus standard(int d) { return from_basis(Matrix::Identity(d, d)); }

  int dim() const { return static_cast<int>(basis_.rows()); }
  const Matrix& basis() const { return basis_; }
  const Matrix& inverse() const { return inverse_; }
  double inverse_norm() const { return inverse_norm_; }

  // Lattice coordinates reduced to [0, 1)^d.
  Vector reduce(const Vector& x) const;
  // |L u| with u = L^{-1}(x - y) wrapped to [-1/2, 1/2)^d. Exact for
  // orthogonal lattices.
  double torus_distance(const Vector& x, const Vector& y) const;

 private:
  Matrix basis_, inverse_;
  double inverse_norm_ = 1.0;
};

struct SupNorms {
  double h_inf = 0.0;
  double grad_inf = 0.0;
  double hess_inf = 0.0;
};

class TrigHamiltonian {
 public:
  TrigHamiltonian(int time_rank, int space_dim, std::vector<TrigTerm> terms,
                  LatticeTorus lattice);
  TrigHamiltonian(int time_rank, int space_dim, std::vector<TrigTerm> terms);
  static TrigHamiltonian zero(int time_rank, int space_dim) {
    return TrigHamiltonian(time_rank, space_dim, {});
  }

  int time_rank() const { return time_rank_; }
  int space_dim() const { return space_dim_; }
  const std::vector<TrigTerm>& terms() const { return terms_; }
  const LatticeTorus& lattice() const { return lattice_; }

  double eval(std::span<const double> t, std::span<const double> x) const;
  Vector grad_x(std::span<const double> t, std::span<const double> x) const;
  Matrix hess_x(std::span<const double> t, std::span<const double> x) const;

  /// Coefficient-sum bounds sum |(c, s)| (2 pi |n| ||L^{-1}||)^order.
  SupNorms sup_norms() const;

  int space_bandwidth() const;  // max |n|_1
  int time_bandwidth() const;   // max |m|_inf
  bool depends_on_space() const;
  bool depends_on_time() const;

  /// Values on a grid for point values f [npts][d]. Any output may be null;
  /// grad is [npts][d], hess is [npts][d][d].
  void eval_on_grid(const SpectralGrid& grid, const std::vector<double>& f, double* value,
                    double* grad, double* hess) const;

 private:
  int time_rank_;
  int space_dim_;
  std::vector<TrigTerm> terms_;
  LatticeTorus lattice_;
};

/// Grid points per axis for pseudospectral composition at cutoff K:
/// max(2 (K + K B + M) + 1, 4 K + 1), B = space bandwidth, M = time bandwidth.
int required_grid_points(int cutoff, const TrigHamiltonian& h);

/// grad H(t, f(t)) projected onto the modes of f. Throws FieldError when an
/// explicit grid is smaller than required_grid_points.
FourierField nabla_h_field(const FourierField& f, const TrigHamiltonian& h, int grid_points = 0);

/// 1/2 <D phi, phi> - mean_t H(t, f(t)), phi the zero-mean part of f.
double action(const FourierField& f, const TrigHamiltonian& h, const Frame& frame,
              const CliffordModule& module, int grid_points = 0);

}  // namespace cliffpen
