#include "cgthermo/dynamics.hpp"

#include <cmath>

namespace cgthermo {

namespace {
constexpr double kTimeSlack = 1e-12;
}

Protocol::Protocol(std::vector<ProtocolSegment> segments, double hbar)
    : segments_(std::move(segments)), hbar_(hbar), total_duration_(0.0) {
  if (segments_.empty()) throw std::invalid_argument("Protocol: no segments");
  if (!(hbar_ > 0.0)) throw std::invalid_argument("Protocol: hbar must be positive");
  const int n = segments_.front().hamiltonian.dim();
  for (const auto& s : segments_) {
    if (!(s.duration > 0.0)) throw std::invalid_argument("Protocol: durations must be positive");
    if (s.hamiltonian.dim() != n) throw std::invalid_argument("Protocol: segment dims differ");
    total_duration_ += s.duration;
  }
}

Protocol::Protocol(HermitianOperator pre_quench, std::vector<ProtocolSegment> segments,
                   double hbar)
    : Protocol(std::move(segments), hbar) {
  if (pre_quench.dim() != dim()) {
    throw std::invalid_argument("Protocol: pre-quench dim differs from segments");
  }
  pre_quench_ = std::move(pre_quench);
}

const HermitianOperator& Protocol::initial_hamiltonian() const {
  return pre_quench_ ? *pre_quench_ : segments_.front().hamiltonian;
}

ReversedProtocol reverse_protocol(const Protocol& p) {
  std::vector<ProtocolSegment> rev;
  rev.reserve(p.segments().size());
  for (auto it = p.segments().rbegin(); it != p.segments().rend(); ++it) {
    rev.push_back({HermitianOperator(conjugate_in_basis(it->hamiltonian.matrix())),
                   it->duration});
  }
  // The reversed process starts from the time-reversed final Hamiltonian.
  HermitianOperator pre(conjugate_in_basis(p.final_hamiltonian().matrix()));
  return ReversedProtocol{Protocol(std::move(pre), std::move(rev), p.hbar())};
}

ComplexMatrix forward_propagator(const Protocol& p, double t) {
  const double tau = p.total_duration();
  if (t < -kTimeSlack || t > tau * (1.0 + kTimeSlack) + kTimeSlack) {
    throw std::out_of_range("forward_propagator: t outside [0, tau]");
  }
  ComplexMatrix u = ComplexMatrix::identity(p.dim());
  double remaining = std::min(std::max(t, 0.0), tau);
  for (const auto& seg : p.segments()) {
    if (remaining <= 0.0) break;
    double dt = std::min(seg.duration, remaining);
    u = propagator(seg.hamiltonian, dt, p.hbar()) * u;
    remaining -= dt;
  }
  return u;
}

ComplexMatrix reverse_propagator(const ReversedProtocol& p, double t) {
  return forward_propagator(p.protocol, t);
}

double microreversibility_check(const Protocol& p, double t) {
  const double tau = p.total_duration();
  if (t < -kTimeSlack || t > tau * (1.0 + kTimeSlack) + kTimeSlack) {
    throw std::out_of_range("microreversibility_check: t outside [0, tau]");
  }
  ReversedProtocol rp = reverse_protocol(p);
  ComplexMatrix lhs = conjugate_in_basis(reverse_propagator(rp, tau - t));
  // U^dagger(tau, t) with U(tau, t) = U(tau,0) U(t,0)^dagger
  ComplexMatrix rhs = forward_propagator(p, t) * forward_propagator(p, tau).adjoint();
  return max_abs_diff(lhs, rhs);
}

ComplexMatrix ladder_lowering(int levels) {
  if (levels < 2) throw std::invalid_argument("ladder_lowering: need at least 2 levels");
  ComplexMatrix a(levels);
  for (int n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

HermitianOperator oscillator_hamiltonian(int levels, double omega, double hbar) {
  if (levels < 2) throw std::invalid_argument("oscillator_hamiltonian: need at least 2 levels");
  if (!(omega > 0.0)) throw std::invalid_argument("oscillator_hamiltonian: omega must be positive");
  ComplexMatrix h(levels);
  for (int n = 0; n < levels; ++n) h(n, n) = hbar * omega * (n + 0.5);
  return HermitianOperator(std::move(h));
}

HermitianOperator driven_oscillator_hamiltonian(int levels, double omega, double f,
                                                double hbar) {
  ComplexMatrix h = oscillator_hamiltonian(levels, omega, hbar).matrix();
  const double c = f / std::sqrt(2.0);
  for (int n = 1; n < levels; ++n) {
    h(n - 1, n) += c * std::sqrt(double(n));
    h(n, n - 1) += c * std::sqrt(double(n));
  }
  return HermitianOperator(std::move(h));
}

Protocol case_study_protocol(int levels, double omega, double f, double tau, double hbar) {
  if (!(tau > 0.0)) throw std::invalid_argument("case_study_protocol: tau must be positive");
  HermitianOperator h0 = oscillator_hamiltonian(levels, omega, hbar);
  HermitianOperator htau = driven_oscillator_hamiltonian(levels, omega, f, hbar);
  std::vector<ProtocolSegment> segs;
  segs.push_back({std::move(htau), tau});
  return Protocol(std::move(h0), std::move(segs), hbar);
}

}  // namespace cgthermo
