#include "cliffpen/spectral_grid.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include "cliffpen/kernels.hpp"

namespace cliffpen {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
std::mutex g_matrix_mutex;
}  // namespace

SpectralGrid::SpectralGrid(int rank, int points_per_axis) : rank_(rank), n_(points_per_axis) {
  if (rank < 1 || points_per_axis < 1) throw FieldError("grid needs rank >= 1 and n >= 1");
  npts_ = 1;
  for (int a = 0; a < rank; ++a) npts_ *= static_cast<std::size_t>(n_);
  coords_.resize(npts_ * rank_);
  std::vector<int> idx(rank, 0);
  for (std::size_t p = 0; p < npts_; ++p) {
    for (int a = 0; a < rank; ++a) coords_[p * rank_ + a] = static_cast<double>(idx[a]) / n_;
    for (int a = rank - 1; a >= 0; --a) {
      if (++idx[a] < n_) break;
      idx[a] = 0;
    }
  }
}

void SpectralGrid::point(std::size_t p, std::span<double> t) const {
  for (int a = 0; a < rank_; ++a) t[a] = coords_[p * rank_ + a];
}

const std::vector<cplx>& SpectralGrid::synthesis_matrix(int cutoff) const {
  std::lock_guard lock(g_matrix_mutex);
  for (const auto& [k, m] : syn_cache_)
    if (k == cutoff) return m;
  const int side = 2 * cutoff + 1;
  std::vector<cplx> m(static_cast<std::size_t>(n_) * side);
  for (int j = 0; j < n_; ++j)
    for (int a = 0; a < side; ++a) {
      // Reduce the integer phase first so the angle stays in [0, 2 pi).
      const long ph = ((static_cast<long>(a - cutoff) * j) % n_ + n_) % n_;
      m[static_cast<std::size_t>(j) * side + a] = std::polar(1.0, kTwoPi * ph / n_);
    }
  syn_cache_.emplace_back(cutoff, std::move(m));
  return syn_cache_.back().second;
}

const std::vector<cplx>& SpectralGrid::analysis_matrix(int cutoff) const {
  std::lock_guard lock(g_matrix_mutex);
  for (const auto& [k, m] : ana_cache_)
    if (k == cutoff) return m;
  const int side = 2 * cutoff + 1;
  std::vector<cplx> m(static_cast<std::size_t>(side) * n_);
  for (int a = 0; a < side; ++a)
    for (int j = 0; j < n_; ++j) {
      const long ph = ((-static_cast<long>(a - cutoff) * j) % n_ + n_) % n_;
      m[static_cast<std::size_t>(a) * n_ + j] = std::polar(1.0 / n_, kTwoPi * ph / n_);
    }
  ana_cache_.emplace_back(cutoff, std::move(m));
  return ana_cache_.back().second;
}

void SpectralGrid::separable(std::vector<cplx>& data, int in_len, int out_len,
                             const std::vector<cplx>& mat, int ncomp) const {
  const auto& kt = kernels::active();
  std::vector<std::size_t> dims(rank_, static_cast<std::size_t>(in_len));
  std::vector<cplx> out;
  for (int a = 0; a < rank_; ++a) {
    std::size_t outer = 1, inner = static_cast<std::size_t>(ncomp);
    for (int b = 0; b < a; ++b) outer *= dims[b];
    for (int b = a + 1; b < rank_; ++b) inner *= dims[b];
    out.assign(outer * out_len * inner, cplx(0.0, 0.0));
    for (std::size_t o = 0; o < outer; ++o)
      for (int p = 0; p < out_len; ++p) {
        cplx* dst = out.data() + (o * out_len + p) * inner;
        for (int q = 0; q < in_len; ++q) {
          const cplx w = mat[static_cast<std::size_t>(p) * in_len + q];
          kt.caxpy(inner, w, data.data() + (o * in_len + q) * inner, dst);
        }
      }
    dims[a] = static_cast<std::size_t>(out_len);
    data.swap(out);
  }
}

void SpectralGrid::synthesize(const FourierField& f, std::vector<double>& out) const {
  if (f.rank() != rank_) throw FieldError("field rank differs from grid rank");
  const int k = f.cutoff();
  const int d = f.dim_v();
  const ModeSet& ms = f.modes();
  std::vector<cplx> box(ms.box_size() * d, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const auto c = f.mode(i);
    cplx* pos = box.data() + ms.box_index(i) * d;
    cplx* neg = box.data() + ms.box_index_neg(i) * d;
    if (i == 0) {
      for (int c0 = 0; c0 < d; ++c0) pos[c0] = cplx(c[c0].real(), 0.0);
    } else {
      for (int c0 = 0; c0 < d; ++c0) {
        pos[c0] = c[c0];
        neg[c0] = std::conj(c[c0]);
      }
    }
  }
  separable(box, 2 * k + 1, n_, synthesis_matrix(k), d);
  out.resize(npts_ * d);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = box[i].real();
}

std::vector<double> SpectralGrid::synthesize(const FourierField& f) const {
  std::vector<double> out;
  synthesize(f, out);
  return out;
}

std::vector<cplx> SpectralGrid::analyze_box(const std::vector<double>& values, int ncomp,
                                            int cutoff) const {
  if (values.size() != npts_ * static_cast<std::size_t>(ncomp))
    throw FieldError("grid data size mismatch");
  if (2 * cutoff + 1 > n_) throw FieldError("grid too small for the requested cutoff");
  std::vector<cplx> data(values.begin(), values.end());
  separable(data, n_, 2 * cutoff + 1, analysis_matrix(cutoff), ncomp);
  return data;
}

FourierField SpectralGrid::analyze(const std::vector<double>& values, int dim,
                                   const std::shared_ptr<const ModeSet>& modes) const {
  if (modes->rank() != rank_) throw FieldError("mode set rank differs from grid rank");
  const std::vector<cplx> box = analyze_box(values, dim, modes->cutoff());
  FourierField f(modes, dim);
  for (std::size_t i = 0; i < modes->size(); ++i) {
    const cplx* src = box.data() + modes->box_index(i) * dim;
    auto dst = f.mode(i);
    for (int c = 0; c < dim; ++c) dst[c] = src[c];
  }
  for (int c = 0; c < dim; ++c) f.mode(0)[c] = cplx(f.mode(0)[c].real(), 0.0);
  return f;
}

}  // namespace cliffpen
