#include "cgthermo/operator_core.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace cgthermo {

namespace {

using EigenRowMajor =
    Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

ComplexMatrix::ComplexMatrix(int dim) : dim_(dim), data_(size_t(dim) * dim) {
  if (dim < 1) throw std::invalid_argument("ComplexMatrix: dim must be >= 1");
}

ComplexMatrix::ComplexMatrix(int dim, std::vector<cplx> entries)
    : dim_(dim), data_(std::move(entries)) {
  if (dim < 1) throw std::invalid_argument("ComplexMatrix: dim must be >= 1");
  if (data_.size() != size_t(dim) * dim) {
    throw std::invalid_argument("ComplexMatrix: entry count does not match dim");
  }
}

ComplexMatrix ComplexMatrix::identity(int dim) {
  ComplexMatrix m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<cplx>& d) {
  ComplexMatrix m(int(d.size()));
  for (int i = 0; i < m.dim(); ++i) m(i, i) = d[i];
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<double>& d) {
  ComplexMatrix m(int(d.size()));
  for (int i = 0; i < m.dim(); ++i) m(i, i) = d[i];
  return m;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& rhs) const {
  if (rhs.dim_ != dim_) throw std::invalid_argument("matmul: dimension mismatch");
  ComplexMatrix out(dim_);
  kernels::matmul(data(), rhs.data(), out.data(), dim_);
  return out;
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& rhs) const {
  if (rhs.dim_ != dim_) throw std::invalid_argument("add: dimension mismatch");
  ComplexMatrix out(dim_);
  for (size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] + rhs.data_[i];
  return out;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& rhs) const {
  if (rhs.dim_ != dim_) throw std::invalid_argument("sub: dimension mismatch");
  ComplexMatrix out(dim_);
  for (size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] - rhs.data_[i];
  return out;
}

ComplexMatrix ComplexMatrix::operator*(cplx s) const {
  ComplexMatrix out(dim_);
  for (size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] * s;
  return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(dim_);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) out(r, c) = std::conj((*this)(c, r));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(dim_);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) out(r, c) = (*this)(c, r);
  return out;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix out(dim_);
  for (size_t i = 0; i < data_.size(); ++i) out.data_[i] = std::conj(data_[i]);
  return out;
}

cplx ComplexMatrix::trace() const {
  kernels::detail::CompensatedCplx acc;
  for (int i = 0; i < dim_; ++i) acc.add((*this)(i, i));
  return acc.value();
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const cplx& z : data_) m = std::max(m, std::abs(z));
  return m;
}

double ComplexMatrix::hermiticity_defect() const {
  double d = 0.0;
  for (int r = 0; r < dim_; ++r) {
    for (int c = r; c < dim_; ++c) {
      d = std::max(d, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
    }
  }
  return d;
}

double ComplexMatrix::unitarity_defect() const {
  ComplexMatrix g(dim_);
  kernels::matmul_adjl(data(), data(), g.data(), dim_);
  double d = 0.0;
  for (int r = 0; r < dim_; ++r) {
    for (int c = 0; c < dim_; ++c) {
      cplx expect = (r == c) ? cplx(1.0) : cplx(0.0);
      d = std::max(d, std::abs(g(r, c) - expect));
    }
  }
  return d;
}

bool ComplexMatrix::all_finite() const {
  for (const cplx& z : data_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("max_abs_diff: dimension mismatch");
  double m = 0.0;
  for (int r = 0; r < a.dim(); ++r)
    for (int c = 0; c < a.dim(); ++c) m = std::max(m, std::abs(a(r, c) - b(r, c)));
  return m;
}

HermitianOperator::HermitianOperator(ComplexMatrix m) : matrix_(std::move(m)) {
  if (!matrix_.all_finite()) {
    throw std::invalid_argument("HermitianOperator: non-finite entries");
  }
  if (matrix_.hermiticity_defect() > kHermiticityTol) {
    throw std::invalid_argument("HermitianOperator: Hermiticity defect exceeds 1e-10");
  }
}

EigenSystem hermitian_eig(const HermitianOperator& a) {
  const int n = a.dim();
  Eigen::Map<const EigenRowMajor> mapped(a.matrix().data(), n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver;
  solver.compute(mapped);
  if (solver.info() != Eigen::Success) {
    throw EigDecompositionError("hermitian_eig: eigensolver did not converge");
  }
  EigenSystem es;
  es.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  es.eigenvectors = ComplexMatrix(n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      es.eigenvectors(r, c) = solver.eigenvectors()(r, c);
    }
  }
  return es;
}

ComplexMatrix matrix_function(const HermitianOperator& a,
                              const std::function<cplx(double)>& f) {
  EigenSystem es = hermitian_eig(a);
  const int n = a.dim();
  std::vector<cplx> w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = f(es.eigenvalues[i]);
    if (!std::isfinite(w[i].real()) || !std::isfinite(w[i].imag())) {
      throw std::domain_error("matrix_function: f is not finite on an eigenvalue");
    }
  }
  ComplexMatrix out(n);
  kernels::spectral_sandwich(es.eigenvectors.data(), w.data(), out.data(), n);
  return out;
}

ComplexMatrix propagator(const HermitianOperator& h, double t, double hbar) {
  if (t < 0.0) throw std::invalid_argument("propagator: negative time");
  if (hbar <= 0.0) throw std::invalid_argument("propagator: hbar must be positive");
  return matrix_function(
      h, [t, hbar](double e) { return std::exp(cplx(0.0, -e * t / hbar)); });
}

ComplexMatrix conjugate_in_basis(const ComplexMatrix& a) { return a.conjugate(); }

}  // namespace cgthermo
