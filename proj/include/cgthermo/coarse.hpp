#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cgthermo/thermo.hpp"

namespace cgthermo {

// Energy-resolution partition of an ascending spectrum into contiguous slots.
// Slot ranges index eigenvalue order and are half-open [lo, hi).
struct SlotPartition {
  std::optional<double> delta_eps;       // instrument resolution; empty for explicit slot lists
  std::vector<kernels::IndexRange> slots;
  std::vector<int> multiplicities;       // N_J = slot size
  std::vector<double> source_spectrum;   // ascending fine eigenvalues

  int slot_count() const { return int(slots.size()); }
  int total_states() const { return int(source_spectrum.size()); }
  // Slot that contains fine index j.
  int slot_of(int j) const;
  bool all_singletons() const;
};

// Slot J gets every eigenstate with (J-1)*de <= (e_j - e_min) < J*de; empty
// intervals are dropped and slots re-indexed. Eigenvalues within
// 1e-9*(spectral range) of a bin edge are treated as lying on it, and
// numerically degenerate eigenvalues always share a slot.
SlotPartition build_slots(const EigenSystem& spectrum, double delta_eps);

// Explicit slot sizes in ascending-energy order (must sum to the dimension).
SlotPartition explicit_slots(const EigenSystem& spectrum, const std::vector<int>& sizes);

SlotPartition singleton_slots(const EigenSystem& spectrum);

// Effective Hamiltonian seen at the partition's resolution: degenerate level
// E_J on each slot, expressed in the fine eigenbasis. The E_J depend on the
// temperature at which they were derived.
struct CoarseHamiltonian {
  SlotPartition partition;
  std::vector<double> energies;      // E_J, strictly increasing
  std::vector<double> log_slot_z;    // ln Z_J
  double beta_used;
  ComplexMatrix basis;               // fine eigenvectors (columns)

  ComplexMatrix to_matrix() const;   // sum_J E_J Pi_J
  HermitianOperator to_operator() const { return HermitianOperator(to_matrix()); }
  double slot_min(int j) const;
  double slot_mean(int j) const;
};

// E_J = -(1/beta) ln(Z_J / N_J), evaluated with per-slot max shifts.
CoarseHamiltonian coarse_energies(const HermitianOperator& h, const SlotPartition& partition,
                                  double beta);
CoarseHamiltonian coarse_energies(const EigenSystem& es, const SlotPartition& partition,
                                  double beta);

// The flattening channel: C(rho) = sum_J (tr[rho Pi_J]/N_J) Pi_J in the
// original basis. Trace-preserving, PSD-preserving, unital, idempotent.
DensityMatrix coarse_grain(const DensityMatrix& rho, const SlotPartition& partition,
                           const ComplexMatrix& basis);

// Pinching without flattening: sum_J Pi_J rho Pi_J (keeps within-slot
// structure; used by the non-invasive measurement scheme).
DensityMatrix block_dephase(const DensityMatrix& rho, const SlotPartition& partition,
                            const ComplexMatrix& basis);

// Slot populations tr[rho Pi_J].
std::vector<double> slot_populations(const DensityMatrix& rho, const SlotPartition& partition,
                                     const ComplexMatrix& basis);

struct CoarseThermalState {
  DensityMatrix state;                    // block-flat, original basis
  std::vector<double> slot_probabilities; // p_J = e^{-beta E_J} N_J / Z
  double partition_function;              // equals the fine Z
  double free_energy;                     // equals the fine F
  double log_partition_function;
  CoarseHamiltonian coarse_hamiltonian;
};

CoarseThermalState coarse_thermal_state(const HermitianOperator& h,
                                        const SlotPartition& partition, double beta);

// S(C(rho)) = -sum_J p_J ln(p_J / N_J); always >= S(rho).
double observational_entropy(const DensityMatrix& rho, const SlotPartition& partition,
                             const ComplexMatrix& basis);

struct ConsistencyReport {
  // |ln(e^{-beta E_J} N_J) - ln Z_J| per slot, relative to max(1, |ln Z_J|)
  std::vector<double> slot_residuals;
  double free_energy_residual;  // |coarse F - fine F|
  double max_slot_residual;
  bool pass;
};

// Checks e^{-beta E_J} N_J = Z_J per slot and that the coarse and fine free
// energies agree. energy_perturbation shifts every E_J before checking and
// exists for negative-control tests.
ConsistencyReport verify_consistency(const HermitianOperator& h, const SlotPartition& partition,
                                     double beta, double energy_perturbation = 0.0);

}  // namespace cgthermo
