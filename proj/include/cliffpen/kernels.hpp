#pragma once

// Data-parallel inner loops used by the spectral transforms and the solvers.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant. The active table is chosen once at first use from the
// CPU feature bits; setting CLIFFPEN_SIMD=scalar in the environment forces
// the reference path. Within one table every reduction has a fixed order, so
// results are bitwise reproducible run to run.

#include <complex>
#include <cstddef>
#include <string_view>

namespace cliffpen::kernels {

using cplx = std::complex<double>;

struct KernelTable {
  std::string_view name;

  // y[i] += a * x[i] for complex arrays of length n.
  void (*caxpy)(std::size_t n, cplx a, const cplx* x, cplx* y);

  // Real dot product of length n.
  double (*dot)(std::size_t n, const double* x, const double* y);

  // y[i] += a * x[i] for real arrays of length n.
  void (*axpy)(std::size_t n, double a, const double* x, double* y);

  // Pointwise y_p = M_p x_p for npts symmetric dim x dim blocks.
  // mats is [npts][dim][dim], x and y are [npts][dim].
  void (*sym_matvec_field)(std::size_t npts, std::size_t dim, const double* mats,
                           const double* x, double* y);
};

const KernelTable& scalar_table();

// Null when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table();

// Table in use for this process.
const KernelTable& active();

}  // namespace cliffpen::kernels
