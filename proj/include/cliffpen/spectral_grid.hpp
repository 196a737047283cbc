#pragma once

// Uniform grid on T^r with n points per axis (t_j = j / n) and separable
// transforms between the coefficient box [-K, K]^r and grid values.
// Transforms are explicit DFT passes, one axis at a time, through the
// kernels::caxpy inner loop.

#include <vector>

#include "cliffpen/fourier.hpp"

namespace cliffpen {

class SpectralGrid {
 public:
  SpectralGrid(int rank, int points_per_axis);

  int rank() const { return rank_; }
  int points_per_axis() const { return n_; }
  std::size_t size() const { return npts_; }

  // Coordinates of grid point p.
  void point(std::size_t p, std::span<double> t) const;
  const std::vector<double>& coordinates() const { return coords_; }  // [npts][rank]

  /// Real grid values [npts][dim_v] of a field.
  std::vector<double> synthesize(const FourierField& f) const;
  void synthesize(const FourierField& f, std::vector<double>& out) const;

  /// Coefficients of grid data [npts][dim] onto the half-lattice of `modes`.
  /// Requires modes->cutoff() <= (n - 1) / 2.
  FourierField analyze(const std::vector<double>& values, int dim,
                       const std::shared_ptr<const ModeSet>& modes) const;

  /// Full-box coefficients [(2K+1)^r][ncomp] of real grid data [npts][ncomp].
  std::vector<cplx> analyze_box(const std::vector<double>& values, int ncomp, int cutoff) const;

 private:
  // Applies per-axis matrices (out_len x in_len, row-major) to data laid out
  // [axis0]...[axis r-1][ncomp].
  void separable(std::vector<cplx>& data, int in_len, int out_len,
                 const std::vector<cplx>& mat, int ncomp) const;
  const std::vector<cplx>& synthesis_matrix(int cutoff) const;
  const std::vector<cplx>& analysis_matrix(int cutoff) const;

  int rank_;
  int n_;
  std::size_t npts_;
  std::vector<double> coords_;
  mutable std::vector<std::pair<int, std::vector<cplx>>> syn_cache_, ana_cache_;
};

}  // namespace cliffpen
