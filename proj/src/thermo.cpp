#include "cgthermo/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cgthermo {

DensityMatrix::DensityMatrix(HermitianOperator op) : op_(std::move(op)) {
  double tr = op_.matrix().trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw std::invalid_argument("DensityMatrix: trace differs from 1 beyond 1e-10");
  }
  EigenSystem es = hermitian_eig(op_);
  if (es.eigenvalues.front() < kEigenvalueFloor) {
    throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond -1e-10");
  }
}

DensityMatrix DensityMatrix::pure(const std::vector<cplx>& psi) {
  const int n = int(psi.size());
  double norm2 = 0.0;
  for (const cplx& a : psi) norm2 += std::norm(a);
  ComplexMatrix m(n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = psi[r] * std::conj(psi[c]) / norm2;
  return DensityMatrix(HermitianOperator(std::move(m)));
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  ComplexMatrix m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0 / dim;
  return DensityMatrix(HermitianOperator(std::move(m)));
}

DensityMatrix unitary_conjugate(const ComplexMatrix& u, const DensityMatrix& rho) {
  const int n = u.dim();
  if (rho.dim() != n) throw std::invalid_argument("unitary_conjugate: dimension mismatch");
  ComplexMatrix t(n), out(n);
  kernels::matmul(u.data(), rho.matrix().data(), t.data(), n);
  kernels::matmul_adjr(t.data(), u.data(), out.data(), n);
  return DensityMatrix(HermitianOperator(std::move(out)));
}

double log_sum_exp(const std::vector<double>& v) {
  double m = *std::max_element(v.begin(), v.end());
  kernels::detail::CompensatedSum acc;
  for (double x : v) acc.add(std::exp(x - m));
  return m + std::log(acc.value());
}

ThermalEnsemble gibbs_state(const HermitianOperator& h, double beta) {
  if (!(beta > 0.0)) throw std::domain_error("gibbs_state: beta must be positive");
  EigenSystem es = hermitian_eig(h);
  const int n = h.dim();

  std::vector<double> log_w(n);
  for (int i = 0; i < n; ++i) log_w[i] = -beta * es.eigenvalues[i];
  double log_z = log_sum_exp(log_w);

  std::vector<double> pop(n);
  std::vector<cplx> w(n);
  for (int i = 0; i < n; ++i) {
    pop[i] = std::exp(log_w[i] - log_z);
    w[i] = pop[i];
  }
  ComplexMatrix state(n);
  kernels::spectral_sandwich(es.eigenvectors.data(), w.data(), state.data(), n);

  return ThermalEnsemble{h,
                         beta,
                         DensityMatrix(HermitianOperator(std::move(state))),
                         std::exp(log_z),
                         -log_z / beta,
                         log_z,
                         std::move(pop)};
}

double von_neumann_entropy(const DensityMatrix& rho) {
  EigenSystem es = hermitian_eig(rho.hermitian());
  kernels::detail::CompensatedSum acc;
  for (double lam : es.eigenvalues) {
    if (lam > kEntropyEigenvalueCutoff) acc.add(-lam * std::log(lam));
  }
  return acc.value();
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw std::invalid_argument("relative_entropy: dimension mismatch");
  }
  const int n = rho.dim();

  // tr[rho ln rho]
  EigenSystem es_rho = hermitian_eig(rho.hermitian());
  kernels::detail::CompensatedSum tr_rho_lnrho;
  for (double lam : es_rho.eigenvalues) {
    if (lam > kEntropyEigenvalueCutoff) tr_rho_lnrho.add(lam * std::log(lam));
  }

  // tr[rho ln sigma] via sigma's eigenbasis weights q_k = <w_k| rho |w_k>
  EigenSystem es_sig = hermitian_eig(sigma.hermitian());
  std::vector<double> q(n);
  kernels::basis_diagonal(es_sig.eigenvectors.data(), rho.matrix().data(), q.data(), n);

  kernels::detail::CompensatedSum tr_rho_lnsig;
  for (int k = 0; k < n; ++k) {
    double s = es_sig.eigenvalues[k];
    if (s < kSupportCutoff) {
      if (q[k] > kSupportWeightCutoff) {
        return std::numeric_limits<double>::infinity();
      }
      continue;
    }
    tr_rho_lnsig.add(q[k] * std::log(s));
  }
  return tr_rho_lnrho.value() - tr_rho_lnsig.value();
}

double average_energy(const DensityMatrix& rho, const HermitianOperator& h) {
  if (rho.dim() != h.dim()) {
    throw std::invalid_argument("average_energy: dimension mismatch");
  }
  // tr[H rho], diagonal only
  const int n = h.dim();
  kernels::detail::CompensatedCplx acc;
  for (int i = 0; i < n; ++i) {
    kernels::detail::CompensatedCplx row;
    for (int k = 0; k < n; ++k) row.add(h.matrix()(i, k) * rho.matrix()(k, i));
    acc.add(row.value());
  }
  return acc.value().real();
}

double nonequilibrium_free_energy(const DensityMatrix& rho, const HermitianOperator& h,
                                  double beta) {
  if (!(beta > 0.0)) {
    throw std::domain_error("nonequilibrium_free_energy: beta must be positive");
  }
  return average_energy(rho, h) - von_neumann_entropy(rho) / beta;
}

}  // namespace cgthermo
