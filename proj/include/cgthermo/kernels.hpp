#pragma once

#include <complex>
#include <vector>

// Dense complex linear-algebra kernels on row-major square buffers.
//
// Every kernel exists twice: a serial reference implementation under
// kernels::serial and an OpenMP variant under kernels::par. The parallel
// variants split work so that each output element is accumulated by exactly
// one thread in the same order as the serial code, so the two produce
// bit-identical results for any thread count. The unqualified entry points
// dispatch on problem size.
//
// Accumulations use Neumaier-compensated summation: joint-probability tables
// downstream divide numbers that may be ~1e-12, and the compensated inner
// products keep the forward/reverse computation paths consistent at that
// scale.

namespace cgthermo::kernels {

using cplx = std::complex<double>;

// Half-open index range [lo, hi).
struct IndexRange {
  int lo = 0;
  int hi = 0;
  int size() const { return hi - lo; }
};

namespace detail {

// Neumaier variant of Kahan summation.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

struct CompensatedCplx {
  CompensatedSum re, im;
  void add(cplx x) {
    re.add(x.real());
    im.add(x.imag());
  }
  cplx value() const { return {re.value(), im.value()}; }
};

}  // namespace detail

namespace serial {

// c = a * b
void matmul(const cplx* a, const cplx* b, cplx* c, int n);
// c = a^dagger * b
void matmul_adjl(const cplx* a, const cplx* b, cplx* c, int n);
// c = a * b^dagger
void matmul_adjr(const cplx* a, const cplx* b, cplx* c, int n);
// out = v * diag(w) * v^dagger
void spectral_sandwich(const cplx* v, const cplx* w, cplx* out, int n);
// d[j] = Re( v_j^dagger * rho * v_j ), v_j = j-th column of v
void basis_diagonal(const cplx* v, const cplx* rho, double* d, int n);
// out[r][c] = sum of m over rows[r] x cols[c]; out is nrows*ncols row-major
void block_sums(const double* m, int n, const IndexRange* rows, int nrows,
                const IndexRange* cols, int ncols, double* out);

}  // namespace serial

namespace par {

void matmul(const cplx* a, const cplx* b, cplx* c, int n);
void matmul_adjl(const cplx* a, const cplx* b, cplx* c, int n);
void matmul_adjr(const cplx* a, const cplx* b, cplx* c, int n);
void spectral_sandwich(const cplx* v, const cplx* w, cplx* out, int n);
void basis_diagonal(const cplx* v, const cplx* rho, double* d, int n);
void block_sums(const double* m, int n, const IndexRange* rows, int nrows,
                const IndexRange* cols, int ncols, double* out);

}  // namespace par

// Dispatching entry points (parallel above a size threshold).
void matmul(const cplx* a, const cplx* b, cplx* c, int n);
void matmul_adjl(const cplx* a, const cplx* b, cplx* c, int n);
void matmul_adjr(const cplx* a, const cplx* b, cplx* c, int n);
void spectral_sandwich(const cplx* v, const cplx* w, cplx* out, int n);
void basis_diagonal(const cplx* v, const cplx* rho, double* d, int n);
void block_sums(const double* m, int n, const IndexRange* rows, int nrows,
                const IndexRange* cols, int ncols, double* out);

}  // namespace cgthermo::kernels
