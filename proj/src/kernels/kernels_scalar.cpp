#include "cliffpen/kernels.hpp"

namespace cliffpen::kernels {
namespace {

void caxpy_scalar(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const double ar = a.real();
  const double ai = a.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real();
    const double xi = x[i].imag();
    y[i] = cplx(y[i].real() + ar * xr - ai * xi, y[i].imag() + ar * xi + ai * xr);
  }
}

double dot_scalar(std::size_t n, const double* x, const double* y) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void sym_matvec_field_scalar(std::size_t npts, std::size_t dim, const double* mats,
                             const double* x, double* y) {
  const std::size_t block = dim * dim;
  for (std::size_t p = 0; p < npts; ++p) {
    const double* m = mats + p * block;
    const double* xp = x + p * dim;
    double* yp = y + p * dim;
    for (std::size_t i = 0; i < dim; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < dim; ++j) s += m[i * dim + j] * xp[j];
      yp[i] = s;
    }
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", caxpy_scalar, dot_scalar, axpy_scalar,
                                 sym_matvec_field_scalar};
  return table;
}

}  // namespace cliffpen::kernels
