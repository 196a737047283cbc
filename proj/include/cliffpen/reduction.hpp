#pragma once

// Finite-dimensional reduction of the critical point equation D f = grad H(f).
//
// Modes of the working box are split by the magnitude 2 pi |A^T k| of the
// Dirac eigenvalues: modes with magnitude <= N are retained and, together
// with the mean (base point), span E_N; the rest are excluded. For g in E_N
// the excluded part h(g) solves h = D^{-1} P_perp grad H(g + h) by
// contraction, and Phi(g) = A_H(g + h(g)) is the generating function.
//
// Tangent vectors of E_N use orthonormal coordinates: the d base
// coordinates, then sqrt(2) Re c_k and sqrt(2) Im c_k for every retained
// mode in ModeSet order. Euclidean gradients in these coordinates are L2
// gradients.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "cliffpen/hamiltonian.hpp"
#include "cliffpen/spectral_grid.hpp"

namespace cliffpen {

class ReductionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Truncation {
  double threshold = 0.0;     // N
  double excluded_gap = 0.0;  // smallest excluded magnitude
  double hess_inf = 0.0;
  double q = 0.0;             // hess_inf / excluded_gap
  std::shared_ptr<const ModeSet> modes;
  std::vector<double> magnitude;  // per mode
  std::vector<char> retained;     // per mode; the zero mode is the base slot
  std::size_t retained_modes = 0;  // nonzero retained modes
  std::size_t excluded_modes = 0;

  int cutoff() const { return modes->cutoff(); }
};

/// Distinct mode magnitudes (including 0) whose full shell lies inside the box.
std::vector<double> mode_ladder(const Frame& frame, int cutoff);

/// Retains every mode with magnitude <= threshold (ties retained).
Truncation make_truncation(const Frame& frame, int cutoff, double threshold, double hess_inf);

/// Smallest ladder threshold with hess_inf / excluded_gap <= q_max.
Truncation choose_truncation(const TrigHamiltonian& h, const Frame& frame,
                             const CliffordModule& module, int cutoff, double q_max = 0.25);

struct ReductionOptions {
  double fiber_tol = 1e-12;
  int max_iter = 200;
  int grid_points = 0;  // 0: required_grid_points
  double neumann_tol = 1e-12;
};

struct FiberSolution {
  FourierField h;
  int iterations = 0;
  double final_delta = 0.0;
  double contraction_q = 0.0;  // a priori bound hess_inf / N_excl
  double measured_rate = 0.0;  // last ratio of successive increments
};

struct ReducedState {
  FourierField g;
  FiberSolution fiber;
  std::vector<double> f_grid;     // [npts][d] values of g + h
  std::vector<double> hess_grid;  // [npts][d][d] Hessian of H along f
  FourierField grad_h;            // coefficients of grad H(t, f(t))
  FourierField grad_phi;          // D g - P_N grad H(f)
  double phi = 0.0;
};

class Reduction {
 public:
  Reduction(CliffordModule module, Frame frame, TrigHamiltonian hamiltonian, Truncation trunc,
            ReductionOptions opts = {});

  const CliffordModule& module() const { return module_; }
  const Frame& frame() const { return frame_; }
  const TrigHamiltonian& hamiltonian() const { return h_; }
  const Truncation& truncation() const { return trunc_; }
  const ReductionOptions& options() const { return opts_; }
  const SpectralGrid& grid() const { return grid_; }
  int dim_v() const { return module_.dim_v; }

  FourierField zero_field() const { return FourierField(trunc_.modes, module_.dim_v); }

  FiberSolution solve_fiber(const FourierField& g) const;
  ReducedState evaluate(const FourierField& g) const;
  double phi(const FourierField& g) const { return evaluate(g).phi; }
  FourierField grad_phi(const FourierField& g) const { return evaluate(g).grad_phi; }

  /// Dh(g) w by Neumann series; w is projected onto E_N first.
  FourierField apply_dh(const ReducedState& s, const FourierField& w) const;
  /// Hess Phi(g) w = D w - P_N grad^2 H (w + Dh w).
  FourierField hess_vec(const ReducedState& s, const FourierField& w) const;

  struct DenseHessian {
    Matrix matrix;  // symmetrised
    double asymmetry = 0.0;  // ||H - H^T|| / ||H|| before symmetrisation
  };
  DenseHessian hess_dense(const ReducedState& s) const;

  /// ||h - D^{-1} P_perp grad H(g + h)||.
  double fixed_point_residual(const FourierField& g, const FourierField& h) const;
  /// ||D f - grad H(f)|| over the working box for f = g + h(g).
  double lifted_residual(const ReducedState& s) const;

  FourierField dirac(const FourierField& f) const;
  FourierField inverse_dirac_excluded(const FourierField& f) const;
  void keep_retained(FourierField& f) const;
  void keep_excluded(FourierField& f) const;
  /// Pointwise product with grad^2 H(t, f(t)) of the state.
  FourierField multiply_hessian(const ReducedState& s, const FourierField& w) const;

  int reduced_dim() const { return static_cast<int>(dim_v() * (1 + 2 * retained_.size())); }
  Vector pack(const FourierField& f) const;
  FourierField unpack(const Vector& v) const;
  /// Indices (into the ModeSet) of retained nonzero modes, in coordinate order.
  const std::vector<std::size_t>& retained_indices() const { return retained_; }

 private:
  void require_contraction() const;

  CliffordModule module_;
  Frame frame_;
  TrigHamiltonian h_;
  Truncation trunc_;
  ReductionOptions opts_;
  SpectralGrid grid_;
  std::vector<Matrix> sigma_;        // real symbol per mode
  std::vector<std::size_t> retained_;
  std::vector<std::size_t> excluded_;
};

/// g = x + a cos(2 pi k_top . t + phase) e for the top retained mode k_top.
FourierField shell_probe(const Reduction& red, const Vector& x, double amplitude,
                         const Vector& direction, double phase);

struct LadderRow {
  double threshold = 0.0;
  double excluded_gap = 0.0;
  double q = 0.0;
  double h_norm = 0.0;
  int iters = 0;
};

/// Fiber solves at thresholds multiplier * base.threshold for the probe built
/// from each level (levels that the working box cannot certify are skipped).
std::vector<LadderRow> ladder_diagnostics(
    const CliffordModule& module, const Frame& frame, const TrigHamiltonian& h, int cutoff,
    double base_threshold, std::span<const double> multipliers,
    const std::function<FourierField(const Reduction&)>& probe, ReductionOptions opts = {});

/// Least-squares slope of log h_norm against log excluded_gap.
double ladder_slope(std::span<const LadderRow> rows);

struct LemmaSample {
  double radius = 0.0;
  double abs_r = 0.0;           // |Phi - Phi_0|
  double grad_r = 0.0;          // ||grad Phi - D g||
  double grad_phi0 = 0.0;       // ||D g||
  double abs_r0 = 0.0;          // |A(g + h) - A(g)|
  bool holds = false;           // abs_r + grad_r < grad_phi0
};

struct LemmaReport {
  std::vector<LemmaSample> samples;
  bool crossover_found = false;
  double crossover = 0.0;     // smallest sampled radius beyond which every sample holds
  double r0_constant = 0.0;   // max |R_0| N_excl / (||grad Phi_0|| + 1)
};

LemmaReport lemma_quadratic_diagnostic(const Reduction& red, int directions,
                                       std::span<const double> radii, std::uint64_t seed);

}  // namespace cliffpen
