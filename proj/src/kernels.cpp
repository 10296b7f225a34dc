#include "cgthermo/kernels.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cgthermo::kernels {

namespace {

using detail::CompensatedCplx;
using detail::CompensatedSum;

// Shared per-element bodies. Keeping the row loop outside lets the parallel
// variants hand whole rows to threads while reusing the exact accumulation
// order of the serial reference.

inline void matmul_row(const cplx* a, const cplx* b, cplx* c, int n, int i) {
  for (int j = 0; j < n; ++j) {
    CompensatedCplx acc;
    for (int k = 0; k < n; ++k) {
      acc.add(a[i * n + k] * b[k * n + j]);
    }
    c[i * n + j] = acc.value();
  }
}

inline void matmul_adjl_row(const cplx* a, const cplx* b, cplx* c, int n, int i) {
  for (int j = 0; j < n; ++j) {
    CompensatedCplx acc;
    for (int k = 0; k < n; ++k) {
      acc.add(std::conj(a[k * n + i]) * b[k * n + j]);
    }
    c[i * n + j] = acc.value();
  }
}

inline void matmul_adjr_row(const cplx* a, const cplx* b, cplx* c, int n, int i) {
  for (int j = 0; j < n; ++j) {
    CompensatedCplx acc;
    for (int k = 0; k < n; ++k) {
      acc.add(a[i * n + k] * std::conj(b[j * n + k]));
    }
    c[i * n + j] = acc.value();
  }
}

inline void sandwich_row(const cplx* v, const cplx* w, cplx* out, int n, int i) {
  for (int j = 0; j < n; ++j) {
    CompensatedCplx acc;
    for (int k = 0; k < n; ++k) {
      acc.add(v[i * n + k] * w[k] * std::conj(v[j * n + k]));
    }
    out[i * n + j] = acc.value();
  }
}

inline double basis_diagonal_one(const cplx* v, const cplx* rho, int n, int j) {
  // v_j^dagger rho v_j, accumulated row by row of rho.
  CompensatedCplx acc;
  for (int i = 0; i < n; ++i) {
    CompensatedCplx row;
    for (int k = 0; k < n; ++k) {
      row.add(rho[i * n + k] * v[k * n + j]);
    }
    acc.add(std::conj(v[i * n + j]) * row.value());
  }
  return acc.value().real();
}

inline double block_sum_one(const double* m, int n, IndexRange rows, IndexRange cols) {
  CompensatedSum acc;
  for (int r = rows.lo; r < rows.hi; ++r) {
    for (int c = cols.lo; c < cols.hi; ++c) {
      acc.add(m[r * n + c]);
    }
  }
  return acc.value();
}

constexpr int kParallelCutoff = 64;

inline bool use_parallel(int n) {
#ifdef _OPENMP
  return n >= kParallelCutoff && omp_get_max_threads() > 1;
#else
  (void)n;
  return false;
#endif
}

}  // namespace

namespace serial {

void matmul(const cplx* a, const cplx* b, cplx* c, int n) {
  for (int i = 0; i < n; ++i) matmul_row(a, b, c, n, i);
}

void matmul_adjl(const cplx* a, const cplx* b, cplx* c, int n) {
  for (int i = 0; i < n; ++i) matmul_adjl_row(a, b, c, n, i);
}

void matmul_adjr(const cplx* a, const cplx* b, cplx* c, int n) {
  for (int i = 0; i < n; ++i) matmul_adjr_row(a, b, c, n, i);
}

void spectral_sandwich(const cplx* v, const cplx* w, cplx* out, int n) {
  for (int i = 0; i < n; ++i) sandwich_row(v, w, out, n, i);
}

void basis_diagonal(const cplx* v, const cplx* rho, double* d, int n) {
  for (int j = 0; j < n; ++j) d[j] = basis_diagonal_one(v, rho, n, j);
}

void block_sums(const double* m, int n, const IndexRange* rows, int nrows,
                const IndexRange* cols, int ncols, double* out) {
  for (int r = 0; r < nrows; ++r) {
    for (int c = 0; c < ncols; ++c) {
      out[r * ncols + c] = block_sum_one(m, n, rows[r], cols[c]);
    }
  }
}

}  // namespace serial

namespace par {

void matmul(const cplx* a, const cplx* b, cplx* c, int n) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) matmul_row(a, b, c, n, i);
}

void matmul_adjl(const cplx* a, const cplx* b, cplx* c, int n) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) matmul_adjl_row(a, b, c, n, i);
}

void matmul_adjr(const cplx* a, const cplx* b, cplx* c, int n) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) matmul_adjr_row(a, b, c, n, i);
}

void spectral_sandwich(const cplx* v, const cplx* w, cplx* out, int n) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) sandwich_row(v, w, out, n, i);
}

void basis_diagonal(const cplx* v, const cplx* rho, double* d, int n) {
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) d[j] = basis_diagonal_one(v, rho, n, j);
}

void block_sums(const double* m, int n, const IndexRange* rows, int nrows,
                const IndexRange* cols, int ncols, double* out) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int r = 0; r < nrows; ++r) {
    for (int c = 0; c < ncols; ++c) {
      out[r * ncols + c] = block_sum_one(m, n, rows[r], cols[c]);
    }
  }
}

}  // namespace par

void matmul(const cplx* a, const cplx* b, cplx* c, int n) {
  use_parallel(n) ? par::matmul(a, b, c, n) : serial::matmul(a, b, c, n);
}

void matmul_adjl(const cplx* a, const cplx* b, cplx* c, int n) {
  use_parallel(n) ? par::matmul_adjl(a, b, c, n) : serial::matmul_adjl(a, b, c, n);
}

void matmul_adjr(const cplx* a, const cplx* b, cplx* c, int n) {
  use_parallel(n) ? par::matmul_adjr(a, b, c, n) : serial::matmul_adjr(a, b, c, n);
}

void spectral_sandwich(const cplx* v, const cplx* w, cplx* out, int n) {
  use_parallel(n) ? par::spectral_sandwich(v, w, out, n)
                  : serial::spectral_sandwich(v, w, out, n);
}

void basis_diagonal(const cplx* v, const cplx* rho, double* d, int n) {
  use_parallel(n) ? par::basis_diagonal(v, rho, d, n)
                  : serial::basis_diagonal(v, rho, d, n);
}

void block_sums(const double* m, int n, const IndexRange* rows, int nrows,
                const IndexRange* cols, int ncols, double* out) {
  // Block tables are tiny; the parallel path exists for very fine partitions
  // of large spectra.
  use_parallel(n) ? par::block_sums(m, n, rows, nrows, cols, ncols, out)
                  : serial::block_sums(m, n, rows, nrows, cols, ncols, out);
}

}  // namespace cgthermo::kernels
