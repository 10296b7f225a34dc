#pragma once

#include "cgthermo/coarse.hpp"

namespace cgthermo {

// Work extractable by fine-grained control when handed the state sigma while
// the bath sits at inverse temperature beta: kT * S(sigma || tau_beta).
// Propagates the +infinity signal on support failure.
double extractable_work(const DensityMatrix& sigma, const HermitianOperator& h, double beta);

// Minimal work cost of preparing C(rho) from rho with fine-grained control,
// evaluated through both closed forms. The two agree to ~1e-12; keeping both
// makes the cross-check cheap everywhere it matters.
struct PreparationWork {
  double from_free_energies;      // F(C(rho)) - F(rho), nonequilibrium F
  double from_relative_entropies; // kT [S(C(rho)||tau) - S(rho||tau)]

  double value() const { return from_free_energies; }
  double cross_check_residual() const {
    return std::abs(from_free_energies - from_relative_entropies);
  }
};

PreparationWork preparation_work_min(const DensityMatrix& rho, const SlotPartition& partition,
                                     const HermitianOperator& h, double beta);

// Endpoint bookkeeping of the three-step preparation protocol: sudden quench
// to -kT log rho, quasi-static isothermal ramp to -kT log C(rho), sudden
// quench back. Only endpoint energetics are evaluated; the ramp itself is not
// simulated.
struct ProtocolEnergetics {
  double w1 = 0.0;       // first sudden quench
  double w2 = 0.0;       // quasi-static stage, w2 = dE2 - q2
  double w3 = 0.0;       // second sudden quench
  double q2 = 0.0;       // reversible heat, kT * [S(C(rho)) - S(rho)]
  double w_total = 0.0;  // w1 + w2 + w3 = minimal preparation work
  double s_change = 0.0; // S(C(rho)) - S(rho), nats
};

ProtocolEnergetics protocol_energetics(const DensityMatrix& rho, const SlotPartition& partition,
                                       const HermitianOperator& h, double beta);

// Delta E_C = tr[H C(rho)] - tr[H rho]; bounded by the instrument resolution
// delta_eps and from below by the minimal preparation work.
double coarse_graining_energy_change(const DensityMatrix& rho, const SlotPartition& partition,
                                     const HermitianOperator& h);

// Entropy production of a bookkept (W, Q) realization of rho -> C(rho):
// Sigma = [S(C(rho)) - S(rho)] - beta * Q. With first-law-consistent
// bookkeeping W + Q = Delta E_C this equals beta * (W - W_min); it vanishes
// for the reversible protocol above.
double entropy_production(const DensityMatrix& rho, const SlotPartition& partition,
                          const HermitianOperator& h, double beta, double w_actual,
                          double q_actual);

}  // namespace cgthermo
