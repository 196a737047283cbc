#pragma once

// Clifford symplectic pencils on a finite-dimensional inner-product space V.
//
// A pencil is a list of skew forms omega_l(X, Y) = <M_l X, Y>_std together
// with an inner product <,>_G. Relative to G every form has an operator
// A_omega = G^{-1} M with omega(X, Y) = <A_omega X, Y>_G. The pencil is
// Clifford when the operators of a basis are anti-commuting complex
// structures, orthogonal for G.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cliffpen {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class AlgebraError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SkewForm {
  Matrix matrix;

  // Throws AlgebraError unless square and antisymmetric to 1e-12.
  static SkewForm from_matrix(Matrix m);
};

struct InnerProduct {
  Matrix gram;

  // Throws AlgebraError unless symmetric positive definite.
  static InnerProduct from_gram(Matrix g);
  static InnerProduct identity(int n);
  int dim() const { return static_cast<int>(gram.rows()); }
};

struct CliffordModule {
  int dim_v = 0;
  int rank = 0;
  std::vector<Matrix> generators;
  Matrix metric;
};

struct Pencil {
  std::vector<SkewForm> forms;
  InnerProduct metric;

  int rank() const { return static_cast<int>(forms.size()); }
  int dim() const { return metric.dim(); }
};

/// Maximal rank r = 8a + 2^c - 1 of a pencil on R^n, n = 2^(4a+c) b with b odd.
int radon_hurwitz_max_rank(long n);

/// Dimension of the smallest real Cl_r module (2, 4, 4, 8, 8, 8, 8, 16 for r = 1..8,
/// times 16 per further period of 8).
int minimal_module_dim(int r);

/// Minimal module from fixed signed-permutation generator tables. Rank 3 gives
/// the quaternionic triple with J1 J2 = J3.
CliffordModule build_clifford_module(int r);

/// Direct sum of minimal modules filling dim_v; requires minimal_module_dim(r) | dim_v.
CliffordModule build_clifford_module(int r, int dim_v);

struct ModuleReport {
  bool orthogonal = false;
  bool square_minus_id = false;
  bool anticommute = false;
  double max_violation = 0.0;

  bool ok() const { return orthogonal && square_minus_id && anticommute; }
};

ModuleReport verify_module(std::span<const Matrix> generators, const Matrix& metric);
inline ModuleReport verify_module(const CliffordModule& m) {
  return verify_module(m.generators, m.metric);
}

/// A_omega relative to the metric.
Matrix operator_of(const SkewForm& form, const InnerProduct& metric);

/// (omega, eta) = -tr(A_omega A_eta).
double pencil_pairing(const SkewForm& omega, const SkewForm& eta, const InnerProduct& metric);

struct CompatibilityReport {
  bool compatible = false;
  // A_omega^2 = -lambda I for each basis form.
  std::vector<double> lambda;
  // Same for omega_i + omega_j, i < j, row-major over pairs.
  std::vector<double> pair_lambda;
  double max_defect = 0.0;
};

/// Certificate on the basis forms and all pairwise sums.
CompatibilityReport is_compatible(const Pencil& pencil);

/// Orthonormalises the basis for the pairing and returns the operators as a
/// Clifford module. Throws on incompatible or numerically dependent input.
CliffordModule cliffordize(const Pencil& pencil);

/// Forms omega_l = <J_l ., .>_G of a module.
Pencil pencil_of(const CliffordModule& module);

/// Throws AlgebraError on dependent forms or a degenerate basis/pair combination.
void validate_pencil(const Pencil& pencil);

struct SymbolReport {
  bool invertible = false;
  double sigma_min = 0.0;
};

/// Invertibility of sigma = sum lambda_l J_l. For verified Clifford modules
/// sigma^2 = -|lambda|^2 I, so sigma_min = |lambda|.
SymbolReport symbol_invertible(const CliffordModule& module, std::span<const double> lambda);

/// Same module written in a G-orthonormal basis (metric becomes identity).
CliffordModule to_standard_metric(const CliffordModule& module);

}  // namespace cliffpen
