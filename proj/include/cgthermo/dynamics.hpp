#pragma once

#include <optional>
#include <vector>

#include "cgthermo/operator_core.hpp"

namespace cgthermo {

struct ProtocolSegment {
  HermitianOperator hamiltonian;
  double duration;
};

// Piecewise-constant driving protocol. A sudden quench is represented by a
// separate pre-quench Hamiltonian followed by the post-quench segment(s);
// continuous drives must be discretized by the caller.
class Protocol {
 public:
  Protocol(std::vector<ProtocolSegment> segments, double hbar = 1.0);
  Protocol(HermitianOperator pre_quench, std::vector<ProtocolSegment> segments,
           double hbar = 1.0);

  const std::vector<ProtocolSegment>& segments() const { return segments_; }
  const HermitianOperator& initial_hamiltonian() const;
  const HermitianOperator& final_hamiltonian() const { return segments_.back().hamiltonian; }
  double total_duration() const { return total_duration_; }
  double hbar() const { return hbar_; }
  int dim() const { return segments_.front().hamiltonian.dim(); }

 private:
  std::vector<ProtocolSegment> segments_;
  std::optional<HermitianOperator> pre_quench_;
  double hbar_;
  double total_duration_;
};

// Segment list reversed in order with every Hamiltonian conjugated in the
// fixed basis. Only constructible through reverse_protocol.
struct ReversedProtocol {
  Protocol protocol;
};

ReversedProtocol reverse_protocol(const Protocol& p);

// Time-ordered product of segment propagators up to t in [0, total duration].
ComplexMatrix forward_propagator(const Protocol& p, double t);
ComplexMatrix reverse_propagator(const ReversedProtocol& p, double t);

// max-norm residual of conj(U_rev(tau-t, 0)) against U(tau,0) U(t,0)^dagger.
double microreversibility_check(const Protocol& p, double t);

// Truncated harmonic ladder driven by a constant linear force:
// H0 = hbar*omega*(a^dagger a + 1/2), single segment
// H = H0 + f*(a^dagger + a)/sqrt(2) of the given duration.
Protocol case_study_protocol(int levels, double omega, double f, double tau,
                             double hbar = 1.0);

// Truncated ladder pieces, exposed for tests.
ComplexMatrix ladder_lowering(int levels);
HermitianOperator oscillator_hamiltonian(int levels, double omega, double hbar = 1.0);
HermitianOperator driven_oscillator_hamiltonian(int levels, double omega, double f,
                                                double hbar = 1.0);

}  // namespace cgthermo
