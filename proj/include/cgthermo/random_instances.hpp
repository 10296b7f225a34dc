#pragma once

#include <cstdint>
#include <random>

#include "cgthermo/coarse.hpp"
#include "cgthermo/dynamics.hpp"

namespace cgthermo {

// Seeded generators for randomized property suites. The physical domain is
// spinless (real Hamiltonians, time reversal = conjugation), so protocols and
// TPM instances draw real symmetric matrices; complex Hermitian draws exist
// for the operator-level checks.

std::mt19937_64 make_rng(uint64_t seed);

ComplexMatrix random_hermitian(std::mt19937_64& rng, int dim, double scale = 1.0);
ComplexMatrix random_real_symmetric(std::mt19937_64& rng, int dim, double scale = 1.0);
ComplexMatrix random_unitary(std::mt19937_64& rng, int dim);
DensityMatrix random_density(std::mt19937_64& rng, int dim);

// Random contiguous composition of the spectrum into at least min_slots slots.
SlotPartition random_explicit_partition(std::mt19937_64& rng, const EigenSystem& spectrum,
                                        int min_slots = 2);

// Real symmetric pre-quench Hamiltonian plus 1..max_segments real segments.
Protocol random_protocol(std::mt19937_64& rng, int dim, int max_segments = 3);

struct RandomTpmInstance {
  Protocol protocol;
  SlotPartition initial_partition;
  SlotPartition final_partition;
  double beta;
};

RandomTpmInstance random_tpm_instance(std::mt19937_64& rng, int dim_min, int dim_max,
                                      double beta_min = 0.1, double beta_max = 4.0);

}  // namespace cgthermo
