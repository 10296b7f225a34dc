#pragma once

#include <vector>

#include "cgthermo/operator_core.hpp"

namespace cgthermo {

// Quantum state: Hermitian, unit trace (1e-10), positive semidefinite up to
// a -1e-10 eigenvalue floor. Checked at construction.
class DensityMatrix {
 public:
  explicit DensityMatrix(HermitianOperator op);
  explicit DensityMatrix(ComplexMatrix m) : DensityMatrix(HermitianOperator(std::move(m))) {}

  static DensityMatrix pure(const std::vector<cplx>& psi);
  static DensityMatrix maximally_mixed(int dim);

  int dim() const { return op_.dim(); }
  const ComplexMatrix& matrix() const { return op_.matrix(); }
  const HermitianOperator& hermitian() const { return op_; }

  static constexpr double kTraceTol = 1e-10;
  static constexpr double kEigenvalueFloor = -1e-10;

 private:
  HermitianOperator op_;
};

// Gibbs state of a Hamiltonian together with its partition function and
// equilibrium free energy. log_partition_function is kept alongside Z so
// large-beta regimes stay usable.
struct ThermalEnsemble {
  HermitianOperator hamiltonian;
  double beta;
  DensityMatrix state;
  double partition_function;
  double free_energy;
  double log_partition_function;
  std::vector<double> populations;  // eigenbasis occupation, ascending energy order
};

ThermalEnsemble gibbs_state(const HermitianOperator& h, double beta);

// Entropies in nats. Eigenvalues below 1e-14 are treated as zero.
double von_neumann_entropy(const DensityMatrix& rho);

// S(rho || sigma). Returns +infinity when the support of rho is not contained
// in the support of sigma (sigma eigenvalue < 1e-12 carrying rho weight
// > 1e-10); this is a signaled value, not an error.
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

double average_energy(const DensityMatrix& rho, const HermitianOperator& h);

// F(rho) = tr[H rho] - kT S(rho), with k_B = 1.
double nonequilibrium_free_energy(const DensityMatrix& rho, const HermitianOperator& h,
                                  double beta);

// U rho U^dagger
DensityMatrix unitary_conjugate(const ComplexMatrix& u, const DensityMatrix& rho);

// log(sum(exp(v))) with max-shift.
double log_sum_exp(const std::vector<double>& v);

constexpr double kEntropyEigenvalueCutoff = 1e-14;
constexpr double kSupportCutoff = 1e-12;
constexpr double kSupportWeightCutoff = 1e-10;

}  // namespace cgthermo
