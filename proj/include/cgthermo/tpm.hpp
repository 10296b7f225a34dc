#pragma once

#include "cgthermo/coarse.hpp"
#include "cgthermo/dynamics.hpp"

namespace cgthermo {

// Joint outcome statistics of a two-point energy measurement. Rows index the
// initial outcome, columns the final outcome; work[i][j] is the energy-level
// difference final_levels[j] - initial_levels[i].
struct JointOutcomeTable {
  int rows = 0;
  int cols = 0;
  std::vector<double> probs;  // row-major
  std::vector<double> work;   // row-major
  std::vector<double> initial_levels;
  std::vector<double> final_levels;
  double beta = 0.0;
  double delta_f = 0.0;  // fine-grained F_tau - F_0

  double prob(int i, int j) const { return probs[size_t(i) * cols + j]; }
  double work_value(int i, int j) const { return work[size_t(i) * cols + j]; }
  double total_probability() const;
  double average_work() const;
  double min_probability() const;
};

struct WorkAtom {
  double w;
  double p;
};

// Discrete work distribution; atoms strictly increasing in w after merging.
struct WorkDistribution {
  std::vector<WorkAtom> atoms;
  double merge_tolerance = 0.0;

  double total() const;
};

struct FTReport {
  double jarzynski_value = 0.0;
  double max_crooks_log_residual = 0.0;
  std::vector<double> atom_work;          // matched atoms, ascending
  std::vector<double> log_residuals;      // |ln P(w) - ln P~(-w) - beta(w - dF)|
  std::vector<double> delta_f_estimates;  // w - (1/beta) ln(P(w)/P~(-w))
  int one_sided_atoms = 0;                // support mismatches; consistency failures
  bool crooks_pass = false;
  bool jarzynski_pass = false;
};

// Fine-grained forward scheme: P[n][m] = p_n |<em(tau)|U|en(0)>|^2.
JointOutcomeTable tpm_fine(const HermitianOperator& h0, const HermitianOperator& htau,
                           const ComplexMatrix& u, double beta);

// Coarse forward scheme with measure-and-reprepare:
// P[I][J] = p_I tr[Pi_J U (Pi_I / N_I) U^dagger].
JointOutcomeTable tpm_coarse_forward(const HermitianOperator& h0,
                                     const HermitianOperator& htau,
                                     const SlotPartition& initial_partition,
                                     const SlotPartition& final_partition,
                                     const ComplexMatrix& u, double beta);

// Time-reversed coarse scheme, with the reversed propagator built from the
// protocol. Measurement projectors and initial state carry the time-reversal
// conjugation, which is a no-op for real protocols.
JointOutcomeTable tpm_coarse_reverse(const HermitianOperator& h0,
                                     const HermitianOperator& htau,
                                     const SlotPartition& initial_partition,
                                     const SlotPartition& final_partition,
                                     const Protocol& protocol, double beta);

// Non-invasive variant: the post-measurement state is projected, not
// reprepared, and keeps its fine structure inside each slot.
JointOutcomeTable tpm_noninvasive(const HermitianOperator& h0,
                                  const HermitianOperator& htau,
                                  const SlotPartition& initial_partition,
                                  const SlotPartition& final_partition,
                                  const ComplexMatrix& u, double beta);

JointOutcomeTable tpm_noninvasive_reverse(const HermitianOperator& h0,
                                          const HermitianOperator& htau,
                                          const SlotPartition& initial_partition,
                                          const SlotPartition& final_partition,
                                          const Protocol& protocol, double beta);

// Atoms (sign * W[i][j], P[i][j]) merged within 1e-9 * max(1, energy scale)
// and normalized. sign=-1 yields the distribution of the time-reversed work
// variable.
WorkDistribution work_distribution(const JointOutcomeTable& table, int sign);

// Detailed fluctuation-theorem check between a forward distribution and the
// (already negated) reverse distribution. Atoms with probability <= 1e-14 on
// either side are skipped; an atom present on one side only is counted as a
// consistency failure rather than silently dropped.
FTReport detailed_ft_check(const WorkDistribution& forward, const WorkDistribution& reverse,
                           double beta, double delta_f);

// sum_k p_k exp(-beta (w_k - delta_f)); equals 1 for tables built here.
double jarzynski_check(const WorkDistribution& dist, double beta, double delta_f);

// <W> - delta_f from the joint table.
double dissipated_work(const JointOutcomeTable& table);

// S( rho(t) || conj-transported reverse state at matching time ), built from
// the coarse thermal states of the protocol endpoints. Independent of t and
// equal to beta * dissipated work of the coarse forward table.
double forward_reverse_relative_entropy(const Protocol& protocol,
                                        const SlotPartition& initial_partition,
                                        const SlotPartition& final_partition, double beta,
                                        double t);

struct NoninvasiveBoundReport {
  double beta_wdiss_fine = 0.0;        // beta (<W> - dF), fine scheme
  double rel_entropy_fine = 0.0;       // equals beta_wdiss_fine
  double rel_entropy_projected = 0.0;  // <= rel_entropy_fine (contractivity)
  double wbar_minus_delta_f = 0.0;     // coarse work of the projected scheme
  double beta = 0.0;
};

NoninvasiveBoundReport noninvasive_bound_check(const Protocol& protocol,
                                               const SlotPartition& initial_partition,
                                               const SlotPartition& final_partition,
                                               double beta, double t);

// Independent enumeration of the coarse forward table (dim <= 6): initial
// eigenstate -> uniform repreparation inside its slot -> final eigenstate,
// with amplitudes accumulated by plain loops.
JointOutcomeTable brute_force_oracle(const HermitianOperator& h0,
                                     const HermitianOperator& htau,
                                     const SlotPartition& initial_partition,
                                     const SlotPartition& final_partition,
                                     const ComplexMatrix& u, double beta);

constexpr double kUnitarityGate = 1e-8;
constexpr double kAtomProbabilityCutoff = 1e-14;
constexpr double kCrooksTol = 1e-10;
constexpr double kJarzynskiTol = 1e-10;

}  // namespace cgthermo
