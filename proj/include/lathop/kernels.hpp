#pragma once

// Data-parallel inner loops used by the evolution engine. Each kernel has an
// OpenMP version and a plain serial version in `serial::`; the serial ones are
// the reference the tests and benchmarks compare against.
//
// Reductions are blocked: fixed-size blocks are summed serially and the block
// partials combined in index order, so results are bitwise identical for any
// thread count.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace lathop::kernels {

using cplx = std::complex<double>;

inline constexpr std::size_t kReductionBlock = 1024;

/// Compressed sparse row storage. Column indices are sorted within a row.
struct CsrMatrix {
  std::size_t rows = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col;
  std::vector<cplx> val;

  std::size_t nnz() const { return val.size(); }
  // entry (r, c) or 0
  cplx at(std::size_t r, std::size_t c) const;
};

void set_threads(int n);
int max_threads();

// y = A x
void matvec(const CsrMatrix& a, std::span<const cplx> x, std::span<cplx> y);
// sum conj(a_i) b_i
cplx dot(std::span<const cplx> a, std::span<const cplx> b);
double norm_sq(std::span<const cplx> a);
// y += alpha x
void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);
// out = x + alpha * (A x)
void shifted_apply(const CsrMatrix& a, cplx alpha, std::span<const cplx> x,
                   std::span<cplx> out);
// out_i = x_i * inv_diag_i
void scale_by(std::span<const cplx> inv_diag, std::span<const cplx> x,
              std::span<cplx> out);

namespace serial {
void matvec(const CsrMatrix& a, std::span<const cplx> x, std::span<cplx> y);
cplx dot(std::span<const cplx> a, std::span<const cplx> b);
double norm_sq(std::span<const cplx> a);
void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);
void shifted_apply(const CsrMatrix& a, cplx alpha, std::span<const cplx> x,
                   std::span<cplx> out);
}  // namespace serial

}  // namespace lathop::kernels
