#include "cgthermo/coarse.hpp"

#include <algorithm>
#include <cmath>

namespace cgthermo {

namespace {

constexpr double kBinEdgeTolFactor = 1e-9;
constexpr double kConsistencyTol = 1e-10;

void check_partition_shape(const SlotPartition& p) {
  const int n = p.total_states();
  if (p.slots.empty()) throw std::invalid_argument("SlotPartition: no slots");
  int expect = 0;
  for (size_t j = 0; j < p.slots.size(); ++j) {
    const auto& r = p.slots[j];
    if (r.lo != expect || r.hi <= r.lo) {
      throw std::invalid_argument("SlotPartition: slots must be contiguous and nonempty");
    }
    if (p.multiplicities[j] != r.size()) {
      throw std::invalid_argument("SlotPartition: multiplicity mismatch");
    }
    expect = r.hi;
  }
  if (expect != n) throw std::invalid_argument("SlotPartition: slots must cover all indices");
}

std::vector<double> shifted_log_weights(const std::vector<double>& eps, double beta) {
  std::vector<double> lw(eps.size());
  for (size_t i = 0; i < eps.size(); ++i) lw[i] = -beta * eps[i];
  return lw;
}

}  // namespace

int SlotPartition::slot_of(int j) const {
  for (size_t k = 0; k < slots.size(); ++k) {
    if (j >= slots[k].lo && j < slots[k].hi) return int(k);
  }
  throw std::out_of_range("SlotPartition::slot_of: index outside partition");
}

bool SlotPartition::all_singletons() const {
  return slot_count() == total_states();
}

SlotPartition build_slots(const EigenSystem& spectrum, double delta_eps) {
  if (!(delta_eps > 0.0)) throw std::domain_error("build_slots: delta_eps must be positive");
  const auto& eps = spectrum.eigenvalues;
  const int n = int(eps.size());
  const double range = spectrum.spectral_range();
  const double tol = kBinEdgeTolFactor * range;

  // Group numerically degenerate eigenvalues first so they always share a
  // slot, then bin each group by its lowest member relative to the ground
  // state. A value within tol below a bin edge is treated as sitting on it.
  std::vector<int> bin_of_state(n);
  int first_of_group = 0;
  for (int j = 0; j < n; ++j) {
    if (j > 0 && eps[j] - eps[j - 1] > tol) first_of_group = j;
    double x = eps[first_of_group] - eps.front();
    bin_of_state[j] = int(std::floor((x + tol) / delta_eps));
  }

  SlotPartition p;
  p.delta_eps = delta_eps;
  p.source_spectrum = eps;
  int lo = 0;
  for (int j = 1; j <= n; ++j) {
    if (j == n || bin_of_state[j] != bin_of_state[lo]) {
      p.slots.push_back({lo, j});
      p.multiplicities.push_back(j - lo);
      lo = j;
    }
  }
  check_partition_shape(p);
  return p;
}

SlotPartition explicit_slots(const EigenSystem& spectrum, const std::vector<int>& sizes) {
  SlotPartition p;
  p.delta_eps = std::nullopt;
  p.source_spectrum = spectrum.eigenvalues;
  int lo = 0;
  for (int s : sizes) {
    if (s < 1) throw std::invalid_argument("explicit_slots: slot sizes must be positive");
    p.slots.push_back({lo, lo + s});
    p.multiplicities.push_back(s);
    lo += s;
  }
  if (lo != int(spectrum.eigenvalues.size())) {
    throw std::invalid_argument("explicit_slots: sizes must sum to the dimension");
  }
  check_partition_shape(p);
  return p;
}

SlotPartition singleton_slots(const EigenSystem& spectrum) {
  std::vector<int> sizes(spectrum.eigenvalues.size(), 1);
  return explicit_slots(spectrum, sizes);
}

ComplexMatrix CoarseHamiltonian::to_matrix() const {
  const int n = partition.total_states();
  std::vector<cplx> w(n);
  for (size_t j = 0; j < partition.slots.size(); ++j) {
    for (int k = partition.slots[j].lo; k < partition.slots[j].hi; ++k) {
      w[k] = energies[j];
    }
  }
  ComplexMatrix out(n);
  kernels::spectral_sandwich(basis.data(), w.data(), out.data(), n);
  return out;
}

double CoarseHamiltonian::slot_min(int j) const {
  return partition.source_spectrum[partition.slots[j].lo];
}

double CoarseHamiltonian::slot_mean(int j) const {
  kernels::detail::CompensatedSum acc;
  for (int k = partition.slots[j].lo; k < partition.slots[j].hi; ++k) {
    acc.add(partition.source_spectrum[k]);
  }
  return acc.value() / partition.multiplicities[j];
}

CoarseHamiltonian coarse_energies(const EigenSystem& es, const SlotPartition& partition,
                                  double beta) {
  if (!(beta > 0.0)) throw std::domain_error("coarse_energies: beta must be positive");
  if (int(es.eigenvalues.size()) != partition.total_states()) {
    throw std::invalid_argument("coarse_energies: partition does not match spectrum");
  }
  CoarseHamiltonian ch;
  ch.partition = partition;
  ch.beta_used = beta;
  ch.basis = es.eigenvectors;
  for (size_t j = 0; j < partition.slots.size(); ++j) {
    const auto& r = partition.slots[j];
    std::vector<double> lw;
    lw.reserve(r.size());
    for (int k = r.lo; k < r.hi; ++k) lw.push_back(-beta * es.eigenvalues[k]);
    double log_zj = log_sum_exp(lw);
    ch.log_slot_z.push_back(log_zj);
    ch.energies.push_back(-(log_zj - std::log(double(r.size()))) / beta);
  }
  return ch;
}

CoarseHamiltonian coarse_energies(const HermitianOperator& h, const SlotPartition& partition,
                                  double beta) {
  return coarse_energies(hermitian_eig(h), partition, beta);
}

std::vector<double> slot_populations(const DensityMatrix& rho, const SlotPartition& partition,
                                     const ComplexMatrix& basis) {
  const int n = rho.dim();
  if (basis.dim() != n || partition.total_states() != n) {
    throw std::invalid_argument("slot_populations: dimension mismatch");
  }
  std::vector<double> diag(n);
  kernels::basis_diagonal(basis.data(), rho.matrix().data(), diag.data(), n);
  std::vector<double> pops(partition.slot_count());
  for (int j = 0; j < partition.slot_count(); ++j) {
    kernels::detail::CompensatedSum acc;
    for (int k = partition.slots[j].lo; k < partition.slots[j].hi; ++k) acc.add(diag[k]);
    pops[j] = acc.value();
  }
  return pops;
}

DensityMatrix coarse_grain(const DensityMatrix& rho, const SlotPartition& partition,
                           const ComplexMatrix& basis) {
  const int n = rho.dim();
  std::vector<double> pops = slot_populations(rho, partition, basis);
  std::vector<cplx> w(n);
  for (int j = 0; j < partition.slot_count(); ++j) {
    double q = pops[j] / partition.multiplicities[j];
    for (int k = partition.slots[j].lo; k < partition.slots[j].hi; ++k) w[k] = q;
  }
  ComplexMatrix out(n);
  kernels::spectral_sandwich(basis.data(), w.data(), out.data(), n);
  return DensityMatrix(HermitianOperator(std::move(out)));
}

DensityMatrix block_dephase(const DensityMatrix& rho, const SlotPartition& partition,
                            const ComplexMatrix& basis) {
  const int n = rho.dim();
  if (basis.dim() != n || partition.total_states() != n) {
    throw std::invalid_argument("block_dephase: dimension mismatch");
  }
  ComplexMatrix t(n), in_basis(n);
  kernels::matmul(rho.matrix().data(), basis.data(), t.data(), n);
  kernels::matmul_adjl(basis.data(), t.data(), in_basis.data(), n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (partition.slot_of(r) != partition.slot_of(c)) in_basis(r, c) = 0.0;
    }
  }
  ComplexMatrix back(n), out(n);
  kernels::matmul(basis.data(), in_basis.data(), back.data(), n);
  kernels::matmul_adjr(back.data(), basis.data(), out.data(), n);
  return DensityMatrix(HermitianOperator(std::move(out)));
}

CoarseThermalState coarse_thermal_state(const HermitianOperator& h,
                                        const SlotPartition& partition, double beta) {
  EigenSystem es = hermitian_eig(h);
  CoarseHamiltonian ch = coarse_energies(es, partition, beta);
  const int n = h.dim();

  double log_z = log_sum_exp(shifted_log_weights(es.eigenvalues, beta));

  std::vector<double> probs(partition.slot_count());
  std::vector<cplx> w(n);
  for (int j = 0; j < partition.slot_count(); ++j) {
    probs[j] = std::exp(ch.log_slot_z[j] - log_z);
    double q = probs[j] / partition.multiplicities[j];
    for (int k = partition.slots[j].lo; k < partition.slots[j].hi; ++k) w[k] = q;
  }
  ComplexMatrix state(n);
  kernels::spectral_sandwich(es.eigenvectors.data(), w.data(), state.data(), n);

  double log_z_coarse = log_sum_exp(ch.log_slot_z);
  return CoarseThermalState{DensityMatrix(HermitianOperator(std::move(state))),
                            std::move(probs),
                            std::exp(log_z_coarse),
                            -log_z_coarse / beta,
                            log_z_coarse,
                            std::move(ch)};
}

double observational_entropy(const DensityMatrix& rho, const SlotPartition& partition,
                             const ComplexMatrix& basis) {
  std::vector<double> pops = slot_populations(rho, partition, basis);
  kernels::detail::CompensatedSum acc;
  for (int j = 0; j < partition.slot_count(); ++j) {
    if (pops[j] > kEntropyEigenvalueCutoff) {
      acc.add(-pops[j] * std::log(pops[j] / partition.multiplicities[j]));
    }
  }
  return acc.value();
}

ConsistencyReport verify_consistency(const HermitianOperator& h, const SlotPartition& partition,
                                     double beta, double energy_perturbation) {
  EigenSystem es = hermitian_eig(h);
  CoarseHamiltonian ch = coarse_energies(es, partition, beta);

  ConsistencyReport rep;
  rep.max_slot_residual = 0.0;
  std::vector<double> log_terms(partition.slot_count());
  for (int j = 0; j < partition.slot_count(); ++j) {
    double e = ch.energies[j] + energy_perturbation;
    double lhs = -beta * e + std::log(double(partition.multiplicities[j]));
    double r = std::abs(lhs - ch.log_slot_z[j]) / std::max(1.0, std::abs(ch.log_slot_z[j]));
    rep.slot_residuals.push_back(r);
    rep.max_slot_residual = std::max(rep.max_slot_residual, r);
    log_terms[j] = lhs;
  }
  double fine_f = -log_sum_exp(shifted_log_weights(es.eigenvalues, beta)) / beta;
  double coarse_f = -log_sum_exp(log_terms) / beta;
  rep.free_energy_residual = std::abs(coarse_f - fine_f);
  rep.pass = rep.max_slot_residual <= kConsistencyTol &&
             rep.free_energy_residual <= kConsistencyTol;
  return rep;
}

}  // namespace cgthermo
