#include "lathop/kernels.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lathop::kernels {

namespace {

std::ptrdiff_t ssize(std::size_t n) { return static_cast<std::ptrdiff_t>(n); }

template <class BlockFn>
auto blocked_reduce(std::size_t n, BlockFn block_sum) {
  using T = decltype(block_sum(std::size_t{0}, std::size_t{0}));
  const std::size_t nblocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<T> partial(nblocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < ssize(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    partial[b] = block_sum(lo, hi);
  }
  T total{};
  for (const auto& p : partial) total += p;
  return total;
}

}  // namespace

cplx CsrMatrix::at(std::size_t r, std::size_t c) const {
  const auto first = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]);
  const auto last = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[r + 1]);
  const auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) return {};
  return val[static_cast<std::size_t>(it - col.begin())];
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void matvec(const CsrMatrix& a, std::span<const cplx> x, std::span<cplx> y) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < ssize(a.rows); ++r) {
    cplx acc{};
    for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
      acc += a.val[k] * x[a.col[k]];
    y[r] = acc;
  }
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  return blocked_reduce(a.size(), [&](std::size_t lo, std::size_t hi) {
    cplx s{};
    for (std::size_t i = lo; i < hi; ++i) s += std::conj(a[i]) * b[i];
    return s;
  });
}

double norm_sq(std::span<const cplx> a) {
  return blocked_reduce(a.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += std::norm(a[i]);
    return s;
  });
}

void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < ssize(x.size()); ++i) y[i] += alpha * x[i];
}

void shifted_apply(const CsrMatrix& a, cplx alpha, std::span<const cplx> x,
                   std::span<cplx> out) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < ssize(a.rows); ++r) {
    cplx acc{};
    for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
      acc += a.val[k] * x[a.col[k]];
    out[r] = x[r] + alpha * acc;
  }
}

void scale_by(std::span<const cplx> inv_diag, std::span<const cplx> x,
              std::span<cplx> out) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < ssize(x.size()); ++i) out[i] = inv_diag[i] * x[i];
}

namespace serial {

void matvec(const CsrMatrix& a, std::span<const cplx> x, std::span<cplx> y) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    cplx acc{};
    for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
      acc += a.val[k] * x[a.col[k]];
    y[r] = acc;
  }
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double norm_sq(std::span<const cplx> a) {
  double s = 0.0;
  for (const auto& v : a) s += std::norm(v);
  return s;
}

void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void shifted_apply(const CsrMatrix& a, cplx alpha, std::span<const cplx> x,
                   std::span<cplx> out) {
  serial::matvec(a, x, out);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + alpha * out[i];
}

}  // namespace serial

}  // namespace lathop::kernels
