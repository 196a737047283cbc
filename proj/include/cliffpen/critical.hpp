#pragma once

// Multi-start search for critical points of the reduced function Phi on E_N,
// their classification, and the comparison with the torus Arnold bounds.

#include <array>
#include <optional>
#include <cstdint>
#include <string>
#include <vector>

#include "cliffpen/reduction.hpp"

namespace cliffpen {

class SearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CriticalRecord {
  Vector x;        // base point in lattice coordinates, in [0, 1)^d
  FourierField g;  // reduced point (mean = L x)
  FourierField h;  // excluded part h(g)
  double phi = 0.0;
  double residual = 0.0;         // ||grad Phi||
  double lifted_residual = 0.0;  // ||D f - grad H(f)||, f = g + h
  double margin = 0.0;           // min |eig Hess Phi|
  double hess_norm = 0.0;        // max |eig Hess Phi|
  std::array<int, 3> signature{0, 0, 0};  // positive, negative, zero
  bool nondegenerate = false;
  bool classified = false;
  int iterations = 0;
};

struct SearchOptions {
  int starts = 64;
  double fiber_radius = 1e-2;
  double grad_tol = 1e-10;
  int max_iter = 100;
  double dedup_tol = 1e-6;
  double degeneracy_rel = 1e-8;
  std::uint64_t seed = 0;
  bool classify = true;
  int threads = 0;  // 0: hardware concurrency
  int dense_limit = 600;  // reduced dimension up to which Newton uses the dense Hessian
};

struct NewtonResult {
  FourierField g;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct SearchResult {
  std::vector<CriticalRecord> records;  // deduplicated, sorted by phi
  int converged_starts = 0;
  int failed_starts = 0;
  bool degenerate_continuum = false;
};

/// Damped Newton on grad Phi = 0 from g0.
NewtonResult newton_solve(const Reduction& red, const FourierField& g0, const SearchOptions& opts);

/// Low-discrepancy starting points: Halton base points plus small seeded fiber offsets.
std::vector<FourierField> search_starts(const Reduction& red, const SearchOptions& opts);

SearchResult find_critical_points(const Reduction& red, const SearchOptions& opts);

/// Fills margin, signature and nondegenerate from the dense Hessian.
void classify(const Reduction& red, CriticalRecord& rec, double degeneracy_rel = 1e-8);
void classify(const Reduction::DenseHessian& hess, CriticalRecord& rec, double degeneracy_rel = 1e-8);

/// Record at g (fiber solved, residuals filled, base point reduced).
CriticalRecord make_record(const Reduction& red, const FourierField& g);

/// Greedy clustering by torus distance of base points plus fiber L2 distance,
/// keeping the smallest-residual representative. Output sorted by phi.
std::vector<CriticalRecord> dedup(const Reduction& red, std::vector<CriticalRecord> records,
                                  double tol = 1e-6);

struct ArnoldBounds {
  int sum_betti = 0;       // SB(T^d)
  int cup_length_plus_1 = 0;
};

/// Bounds for W = T^d; any other quotient is rejected.
ArnoldBounds arnold_bounds(int d, const std::string& manifold = "torus");

struct TheoremVerdict {
  bool pass = false;
  int count = 0;
  int required = 0;
  std::string bound;  // "SB" or "CL+1"
  bool all_nondegenerate = false;
  double max_lifted_residual = 0.0;
  std::string label;
};

TheoremVerdict verify_theorem(const std::vector<CriticalRecord>& records, bool h_nondegenerate,
                              int d);

}  // namespace cliffpen
