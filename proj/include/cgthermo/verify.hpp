#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cgthermo {

struct InvariantResult {
  std::string name;
  int instances = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerifyOptions {
  uint64_t seed = 1;
  // Shifts every coarse level before the consistency check; a nonzero value
  // must make the consistency suite fail (negative control).
  double inject_energy_perturbation = 0.0;
};

// Runs every module's randomized invariant suite. Deterministic for a given
// seed; suites are independent and may run concurrently.
std::vector<InvariantResult> run_invariant_suites(const VerifyOptions& options);

}  // namespace cgthermo
