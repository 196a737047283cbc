#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cliffpen/kernels.hpp"

using namespace cliffpen::kernels;

namespace {

std::vector<double> random_reals(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

std::vector<cplx> random_complex(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  std::vector<cplx> v(n);
  for (cplx& x : v) x = {d(rng), d(rng)};
  return v;
}

}  // namespace

TEST_CASE("active table is one of the known tables") {
  const KernelTable& t = active();
  CHECK((t.name == "scalar" || t.name == "avx2"));
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  const KernelTable* simd = avx2_table();
  if (simd == nullptr) {
    MESSAGE("AVX2 not available; equivalence test skipped");
    return;
  }
  const KernelTable& ref = scalar_table();
  std::mt19937_64 rng(7);

  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 33u, 257u, 1000u}) {
    const auto x = random_complex(n, rng);
    auto y1 = random_complex(n, rng);
    auto y2 = y1;
    const cplx a(0.3, -1.7);
    ref.caxpy(n, a, x.data(), y1.data());
    simd->caxpy(n, a, x.data(), y2.data());
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-14 * (1 + std::abs(y1[i])));

    const auto u = random_reals(n, rng), v = random_reals(n, rng);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale += std::abs(u[i] * v[i]);
    CHECK(std::abs(ref.dot(n, u.data(), v.data()) - simd->dot(n, u.data(), v.data())) <= 1e-14 * (1 + scale));

    auto w1 = random_reals(n, rng);
    auto w2 = w1;
    ref.axpy(n, -0.25, u.data(), w1.data());
    simd->axpy(n, -0.25, u.data(), w2.data());
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(w1[i] - w2[i]) <= 1e-15 * (1 + std::abs(w1[i])));
  }

  for (std::size_t dim = 1; dim <= 9; ++dim) {
    const std::size_t npts = 37;
    std::vector<double> mats = random_reals(npts * dim * dim, rng);
    for (std::size_t p = 0; p < npts; ++p)
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < i; ++j) mats[p * dim * dim + j * dim + i] = mats[p * dim * dim + i * dim + j];
    const auto x = random_reals(npts * dim, rng);
    std::vector<double> y1(npts * dim), y2(npts * dim);
    ref.sym_matvec_field(npts, dim, mats.data(), x.data(), y1.data());
    simd->sym_matvec_field(npts, dim, mats.data(), x.data(), y2.data());
    for (std::size_t i = 0; i < y1.size(); ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-13 * (1 + std::abs(y1[i])));
  }
}

TEST_CASE("scalar kernels match direct formulas") {
  const KernelTable& ref = scalar_table();
  std::vector<cplx> x{{1, 2}, {3, -1}}, y{{0, 0}, {1, 1}};
  ref.caxpy(2, cplx(0, 1), x.data(), y.data());
  CHECK(y[0] == cplx(-2, 1));
  CHECK(y[1] == cplx(2, 4));
  std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  CHECK(ref.dot(3, a.data(), b.data()) == 32.0);
  // Symmetric 2x2 block [[2, 1], [1, 3]] on (1, -1).
  std::vector<double> m{2, 1, 1, 3}, v{1, -1}, out(2);
  ref.sym_matvec_field(1, 2, m.data(), v.data(), out.data());
  CHECK(out[0] == 1.0);
  CHECK(out[1] == -2.0);
}
