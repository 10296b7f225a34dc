#include "cgthermo/infothermo.hpp"

#include <cmath>

namespace cgthermo {

namespace {

constexpr double kRankFloor = 1e-14;

// -kT log rho with eigenvalues floored at 1e-14 and renormalized, so the
// effective Hamiltonians of the three-step protocol stay finite for
// rank-deficient states.
HermitianOperator effective_hamiltonian(const DensityMatrix& rho, double beta) {
  EigenSystem es = hermitian_eig(rho.hermitian());
  const int n = rho.dim();
  std::vector<double> lam(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    lam[i] = std::max(es.eigenvalues[i], kRankFloor);
    total += lam[i];
  }
  std::vector<cplx> w(n);
  for (int i = 0; i < n; ++i) w[i] = -std::log(lam[i] / total) / beta;
  ComplexMatrix out(n);
  kernels::spectral_sandwich(es.eigenvectors.data(), w.data(), out.data(), n);
  return HermitianOperator(std::move(out));
}

}  // namespace

double extractable_work(const DensityMatrix& sigma, const HermitianOperator& h, double beta) {
  if (!(beta > 0.0)) throw std::domain_error("extractable_work: beta must be positive");
  ThermalEnsemble tau = gibbs_state(h, beta);
  return relative_entropy(sigma, tau.state) / beta;
}

PreparationWork preparation_work_min(const DensityMatrix& rho, const SlotPartition& partition,
                                     const HermitianOperator& h, double beta) {
  if (!(beta > 0.0)) throw std::domain_error("preparation_work_min: beta must be positive");
  EigenSystem es = hermitian_eig(h);
  DensityMatrix flattened = coarse_grain(rho, partition, es.eigenvectors);
  ThermalEnsemble tau = gibbs_state(h, beta);

  PreparationWork w;
  w.from_free_energies = nonequilibrium_free_energy(flattened, h, beta) -
                         nonequilibrium_free_energy(rho, h, beta);
  w.from_relative_entropies =
      (relative_entropy(flattened, tau.state) - relative_entropy(rho, tau.state)) / beta;
  return w;
}

ProtocolEnergetics protocol_energetics(const DensityMatrix& rho, const SlotPartition& partition,
                                       const HermitianOperator& h, double beta) {
  if (!(beta > 0.0)) throw std::domain_error("protocol_energetics: beta must be positive");
  EigenSystem es = hermitian_eig(h);
  DensityMatrix flattened = coarse_grain(rho, partition, es.eigenvectors);

  HermitianOperator h_start = effective_hamiltonian(rho, beta);
  HermitianOperator h_end = effective_hamiltonian(flattened, beta);

  ProtocolEnergetics e;
  e.s_change = von_neumann_entropy(flattened) - von_neumann_entropy(rho);
  e.q2 = e.s_change / beta;
  e.w1 = average_energy(rho, h_start) - average_energy(rho, h);
  double de2 = average_energy(flattened, h_end) - average_energy(rho, h_start);
  e.w2 = de2 - e.q2;
  e.w3 = average_energy(flattened, h) - average_energy(flattened, h_end);
  e.w_total = e.w1 + e.w2 + e.w3;
  return e;
}

double coarse_graining_energy_change(const DensityMatrix& rho, const SlotPartition& partition,
                                     const HermitianOperator& h) {
  EigenSystem es = hermitian_eig(h);
  DensityMatrix flattened = coarse_grain(rho, partition, es.eigenvectors);
  return average_energy(flattened, h) - average_energy(rho, h);
}

double entropy_production(const DensityMatrix& rho, const SlotPartition& partition,
                          const HermitianOperator& h, double beta, double w_actual,
                          double q_actual) {
  if (!(beta > 0.0)) throw std::domain_error("entropy_production: beta must be positive");
  (void)w_actual;  // part of the bookkept pair; Sigma only needs the heat leg
  EigenSystem es = hermitian_eig(h);
  DensityMatrix flattened = coarse_grain(rho, partition, es.eigenvectors);
  double ds = von_neumann_entropy(flattened) - von_neumann_entropy(rho);
  return ds - beta * q_actual;
}

}  // namespace cgthermo
