#include "cliffpen/kernels.hpp"

#include <immintrin.h>

namespace cliffpen::kernels {
namespace {

// Two complex doubles per register: [r0 i0 r1 i1].
void caxpy_avx2(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  const auto* xd = reinterpret_cast<const double*>(x);
  auto* yd = reinterpret_cast<double*>(y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    const __m256d xs = _mm256_permute_pd(xv, 0b0101);  // [i0 r0 i1 r1]
    // ar*x + ai*(-xi, xr)
    const __m256d t = _mm256_mul_pd(ai, xs);
    const __m256d rot = _mm256_addsub_pd(_mm256_setzero_pd(), t);  // [-ai*i0, ai*r0, ...]
    const __m256d r = _mm256_fmadd_pd(ar, xv, rot);
    _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(yv, r));
  }
  for (; i < n; ++i) {
    const double xr = x[i].real();
    const double xi = x[i].imag();
    y[i] = cplx(y[i].real() + a.real() * xr - a.imag() * xi,
                y[i].imag() + a.real() * xi + a.imag() * xr);
  }
}

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(std::size_t n, const double* x, const double* y) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_avx2(std::size_t n, double a, const double* x, double* y) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

// Symmetric blocks: row i equals column i, so y = sum_j x_j * row_j.
void sym_matvec_field_avx2(std::size_t npts, std::size_t dim, const double* mats,
                           const double* x, double* y) {
  const std::size_t block = dim * dim;
  if (dim % 4 != 0) {
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
    return;
  }
  for (std::size_t p = 0; p < npts; ++p) {
    const double* m = mats + p * block;
    const double* xp = x + p * dim;
    double* yp = y + p * dim;
    for (std::size_t c = 0; c < dim; c += 4) {
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t j = 0; j < dim; ++j)
        acc = _mm256_fmadd_pd(_mm256_set1_pd(xp[j]), _mm256_loadu_pd(m + j * dim + c), acc);
      _mm256_storeu_pd(yp + c, acc);
    }
  }
}

}  // namespace

const KernelTable& avx2_table_impl() {
  static const KernelTable table{"avx2", caxpy_avx2, dot_avx2, axpy_avx2, sym_matvec_field_avx2};
  return table;
}

}  // namespace cliffpen::kernels
