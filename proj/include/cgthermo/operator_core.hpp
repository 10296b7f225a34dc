#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "cgthermo/kernels.hpp"

namespace cgthermo {

using cplx = std::complex<double>;

// Dense square complex matrix, row-major, double precision.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(int dim);  // zero-initialized
  ComplexMatrix(int dim, std::vector<cplx> entries);

  static ComplexMatrix identity(int dim);
  static ComplexMatrix diagonal(const std::vector<cplx>& d);
  static ComplexMatrix diagonal(const std::vector<double>& d);

  int dim() const { return dim_; }
  cplx& operator()(int r, int c) { return data_[r * dim_ + c]; }
  const cplx& operator()(int r, int c) const { return data_[r * dim_ + c]; }
  const cplx* data() const { return data_.data(); }
  cplx* data() { return data_.data(); }

  ComplexMatrix operator*(const ComplexMatrix& rhs) const;
  ComplexMatrix operator+(const ComplexMatrix& rhs) const;
  ComplexMatrix operator-(const ComplexMatrix& rhs) const;
  ComplexMatrix operator*(cplx s) const;

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conjugate() const;
  cplx trace() const;

  double max_abs() const;
  // max-norm defect from A = A^dagger
  double hermiticity_defect() const;
  // max-norm defect of A^dagger A from the identity
  double unitarity_defect() const;
  bool all_finite() const;

 private:
  int dim_ = 0;
  std::vector<cplx> data_;
};

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

// Hermitian observable. Construction rejects matrices whose max-norm
// Hermiticity defect exceeds 1e-10 or that contain non-finite entries.
class HermitianOperator {
 public:
  explicit HermitianOperator(ComplexMatrix m);

  int dim() const { return matrix_.dim(); }
  const ComplexMatrix& matrix() const { return matrix_; }

  static constexpr double kHermiticityTol = 1e-10;

 private:
  ComplexMatrix matrix_;
};

// Eigenvalues ascending; eigenvector j is column j of `eigenvectors`.
struct EigenSystem {
  std::vector<double> eigenvalues;
  ComplexMatrix eigenvectors;

  int dim() const { return eigenvectors.dim(); }
  double spectral_range() const {
    return eigenvalues.empty() ? 0.0 : eigenvalues.back() - eigenvalues.front();
  }
};

// Thrown when the underlying eigensolver fails to converge.
struct EigDecompositionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

EigenSystem hermitian_eig(const HermitianOperator& a);

// V f(Lambda) V^dagger. Throws std::domain_error if f is non-finite on an
// eigenvalue.
ComplexMatrix matrix_function(const HermitianOperator& a,
                              const std::function<cplx(double)>& f);

// exp(-i H t / hbar)
ComplexMatrix propagator(const HermitianOperator& h, double t, double hbar = 1.0);

// Time-reversal conjugation: entrywise complex conjugate in the fixed
// computational basis. Involutive; multiplicative over products.
ComplexMatrix conjugate_in_basis(const ComplexMatrix& a);

}  // namespace cgthermo
