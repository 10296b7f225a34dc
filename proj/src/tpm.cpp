#include "cgthermo/tpm.hpp"

#include <algorithm>
#include <cmath>

namespace cgthermo {

namespace {

using kernels::detail::CompensatedSum;

struct ThermalSide {
  EigenSystem es;
  double log_z;
  double free_energy;
  std::vector<double> populations;  // fine Gibbs weights
};

ThermalSide thermal_side(const HermitianOperator& h, double beta) {
  ThermalSide s;
  s.es = hermitian_eig(h);
  std::vector<double> lw(s.es.eigenvalues.size());
  for (size_t i = 0; i < lw.size(); ++i) lw[i] = -beta * s.es.eigenvalues[i];
  s.log_z = log_sum_exp(lw);
  s.free_energy = -s.log_z / beta;
  s.populations.resize(lw.size());
  for (size_t i = 0; i < lw.size(); ++i) s.populations[i] = std::exp(lw[i] - s.log_z);
  return s;
}

void check_partition_matches(const SlotPartition& p, const EigenSystem& es,
                             const char* where) {
  if (p.total_states() != int(es.eigenvalues.size())) {
    throw std::invalid_argument(std::string(where) + ": partition size mismatch");
  }
  double scale = std::max(1.0, std::abs(es.eigenvalues.back()));
  for (size_t i = 0; i < es.eigenvalues.size(); ++i) {
    if (std::abs(p.source_spectrum[i] - es.eigenvalues[i]) > 1e-8 * scale) {
      throw std::invalid_argument(std::string(where) +
                                  ": partition built from a different spectrum");
    }
  }
}

void check_unitary(const ComplexMatrix& u, const char* where) {
  if (u.unitarity_defect() > kUnitarityGate) {
    throw std::invalid_argument(std::string(where) + ": propagator is not unitary");
  }
}

// |(V_left^dagger U V_right)(m, n)|^2
std::vector<double> overlap_probabilities(const ComplexMatrix& v_left,
                                          const ComplexMatrix& u,
                                          const ComplexMatrix& v_right) {
  const int n = u.dim();
  ComplexMatrix t(n), m(n);
  kernels::matmul(u.data(), v_right.data(), t.data(), n);
  kernels::matmul_adjl(v_left.data(), t.data(), m.data(), n);
  std::vector<double> p(size_t(n) * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) p[size_t(r) * n + c] = std::norm(m(r, c));
  return p;
}

std::vector<double> slot_probs_from(const CoarseHamiltonian& ch, double log_z) {
  std::vector<double> p(ch.log_slot_z.size());
  for (size_t j = 0; j < p.size(); ++j) p[j] = std::exp(ch.log_slot_z[j] - log_z);
  return p;
}

void fill_work(JointOutcomeTable& t) {
  t.work.resize(size_t(t.rows) * t.cols);
  for (int i = 0; i < t.rows; ++i) {
    for (int j = 0; j < t.cols; ++j) {
      t.work[size_t(i) * t.cols + j] = t.final_levels[j] - t.initial_levels[i];
    }
  }
}

void check_protocol_matches(const Protocol& protocol, const HermitianOperator& h0,
                            const HermitianOperator& htau, const char* where) {
  double scale = std::max({1.0, h0.matrix().max_abs(), htau.matrix().max_abs()});
  if (max_abs_diff(protocol.initial_hamiltonian().matrix(), h0.matrix()) > 1e-9 * scale ||
      max_abs_diff(protocol.final_hamiltonian().matrix(), htau.matrix()) > 1e-9 * scale) {
    throw std::invalid_argument(std::string(where) +
                                ": protocol endpoints differ from supplied Hamiltonians");
  }
}

}  // namespace

double JointOutcomeTable::total_probability() const {
  CompensatedSum acc;
  for (double p : probs) acc.add(p);
  return acc.value();
}

double JointOutcomeTable::average_work() const {
  CompensatedSum acc;
  for (size_t k = 0; k < probs.size(); ++k) acc.add(probs[k] * work[k]);
  return acc.value();
}

double JointOutcomeTable::min_probability() const {
  double m = probs.empty() ? 0.0 : probs.front();
  for (double p : probs) m = std::min(m, p);
  return m;
}

JointOutcomeTable tpm_fine(const HermitianOperator& h0, const HermitianOperator& htau,
                           const ComplexMatrix& u, double beta) {
  check_unitary(u, "tpm_fine");
  ThermalSide s0 = thermal_side(h0, beta);
  ThermalSide st = thermal_side(htau, beta);
  const int n = h0.dim();

  // row index of p_fine is the final eigenstate m, column the initial n.
  std::vector<double> p_fine =
      overlap_probabilities(st.es.eigenvectors, u, s0.es.eigenvectors);

  JointOutcomeTable t;
  t.rows = n;
  t.cols = n;
  t.initial_levels = s0.es.eigenvalues;
  t.final_levels = st.es.eigenvalues;
  t.beta = beta;
  t.delta_f = st.free_energy - s0.free_energy;
  t.probs.resize(size_t(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int m = 0; m < n; ++m) {
      t.probs[size_t(i) * n + m] = s0.populations[i] * p_fine[size_t(m) * n + i];
    }
  }
  fill_work(t);
  return t;
}

JointOutcomeTable tpm_coarse_forward(const HermitianOperator& h0,
                                     const HermitianOperator& htau,
                                     const SlotPartition& initial_partition,
                                     const SlotPartition& final_partition,
                                     const ComplexMatrix& u, double beta) {
  check_unitary(u, "tpm_coarse_forward");
  ThermalSide s0 = thermal_side(h0, beta);
  ThermalSide st = thermal_side(htau, beta);
  check_partition_matches(initial_partition, s0.es, "tpm_coarse_forward");
  check_partition_matches(final_partition, st.es, "tpm_coarse_forward");

  CoarseHamiltonian ch0 = coarse_energies(s0.es, initial_partition, beta);
  CoarseHamiltonian cht = coarse_energies(st.es, final_partition, beta);
  std::vector<double> slot_p0 = slot_probs_from(ch0, s0.log_z);

  const int n = h0.dim();
  std::vector<double> p_fine =
      overlap_probabilities(st.es.eigenvectors, u, s0.es.eigenvectors);

  // T[J][I] = tr[Pi_J U Pi_I U^dagger] (rows of p_fine are final states).
  const int ni = initial_partition.slot_count();
  const int nf = final_partition.slot_count();
  std::vector<double> block(size_t(nf) * ni);
  kernels::block_sums(p_fine.data(), n, final_partition.slots.data(), nf,
                      initial_partition.slots.data(), ni, block.data());

  JointOutcomeTable t;
  t.rows = ni;
  t.cols = nf;
  t.initial_levels = ch0.energies;
  t.final_levels = cht.energies;
  t.beta = beta;
  t.delta_f = st.free_energy - s0.free_energy;
  t.probs.resize(size_t(ni) * nf);
  for (int i = 0; i < ni; ++i) {
    double scale = slot_p0[i] / initial_partition.multiplicities[i];
    for (int j = 0; j < nf; ++j) {
      t.probs[size_t(i) * nf + j] = scale * block[size_t(j) * ni + i];
    }
  }
  fill_work(t);
  return t;
}

JointOutcomeTable tpm_coarse_reverse(const HermitianOperator& h0,
                                     const HermitianOperator& htau,
                                     const SlotPartition& initial_partition,
                                     const SlotPartition& final_partition,
                                     const Protocol& protocol, double beta) {
  check_protocol_matches(protocol, h0, htau, "tpm_coarse_reverse");
  ThermalSide s0 = thermal_side(h0, beta);
  ThermalSide st = thermal_side(htau, beta);
  check_partition_matches(initial_partition, s0.es, "tpm_coarse_reverse");
  check_partition_matches(final_partition, st.es, "tpm_coarse_reverse");

  CoarseHamiltonian ch0 = coarse_energies(s0.es, initial_partition, beta);
  CoarseHamiltonian cht = coarse_energies(st.es, final_partition, beta);
  std::vector<double> slot_pt = slot_probs_from(cht, st.log_z);

  // Transport the reversed-protocol propagator back with the time-reversal
  // conjugation; micro-reversibility makes this U^dagger(tau, 0).
  ReversedProtocol rp = reverse_protocol(protocol);
  ComplexMatrix v =
      conjugate_in_basis(reverse_propagator(rp, protocol.total_duration()));
  check_unitary(v, "tpm_coarse_reverse");

  const int n = h0.dim();
  // rows are initial eigenstates, columns final ones.
  std::vector<double> p_fine =
      overlap_probabilities(s0.es.eigenvectors, v, st.es.eigenvectors);

  const int ni = initial_partition.slot_count();
  const int nf = final_partition.slot_count();
  std::vector<double> block(size_t(ni) * nf);
  kernels::block_sums(p_fine.data(), n, initial_partition.slots.data(), ni,
                      final_partition.slots.data(), nf, block.data());

  JointOutcomeTable t;
  t.rows = ni;
  t.cols = nf;
  t.initial_levels = ch0.energies;
  t.final_levels = cht.energies;
  t.beta = beta;
  t.delta_f = st.free_energy - s0.free_energy;
  t.probs.resize(size_t(ni) * nf);
  for (int i = 0; i < ni; ++i) {
    for (int j = 0; j < nf; ++j) {
      double scale = slot_pt[j] / final_partition.multiplicities[j];
      t.probs[size_t(i) * nf + j] = scale * block[size_t(i) * nf + j];
    }
  }
  fill_work(t);
  return t;
}

JointOutcomeTable tpm_noninvasive(const HermitianOperator& h0,
                                  const HermitianOperator& htau,
                                  const SlotPartition& initial_partition,
                                  const SlotPartition& final_partition,
                                  const ComplexMatrix& u, double beta) {
  check_unitary(u, "tpm_noninvasive");
  ThermalSide s0 = thermal_side(h0, beta);
  ThermalSide st = thermal_side(htau, beta);
  check_partition_matches(initial_partition, s0.es, "tpm_noninvasive");
  check_partition_matches(final_partition, st.es, "tpm_noninvasive");

  CoarseHamiltonian ch0 = coarse_energies(s0.es, initial_partition, beta);
  CoarseHamiltonian cht = coarse_energies(st.es, final_partition, beta);

  const int n = h0.dim();
  std::vector<double> p_fine =
      overlap_probabilities(st.es.eigenvectors, u, s0.es.eigenvectors);
  // weight columns by the initial Gibbs populations, then aggregate
  for (int m = 0; m < n; ++m) {
    for (int i = 0; i < n; ++i) p_fine[size_t(m) * n + i] *= s0.populations[i];
  }

  const int ni = initial_partition.slot_count();
  const int nf = final_partition.slot_count();
  std::vector<double> block(size_t(nf) * ni);
  kernels::block_sums(p_fine.data(), n, final_partition.slots.data(), nf,
                      initial_partition.slots.data(), ni, block.data());

  JointOutcomeTable t;
  t.rows = ni;
  t.cols = nf;
  t.initial_levels = ch0.energies;
  t.final_levels = cht.energies;
  t.beta = beta;
  t.delta_f = st.free_energy - s0.free_energy;
  t.probs.resize(size_t(ni) * nf);
  for (int i = 0; i < ni; ++i) {
    for (int j = 0; j < nf; ++j) {
      t.probs[size_t(i) * nf + j] = block[size_t(j) * ni + i];
    }
  }
  fill_work(t);
  return t;
}

JointOutcomeTable tpm_noninvasive_reverse(const HermitianOperator& h0,
                                          const HermitianOperator& htau,
                                          const SlotPartition& initial_partition,
                                          const SlotPartition& final_partition,
                                          const Protocol& protocol, double beta) {
  check_protocol_matches(protocol, h0, htau, "tpm_noninvasive_reverse");
  ThermalSide s0 = thermal_side(h0, beta);
  ThermalSide st = thermal_side(htau, beta);
  check_partition_matches(initial_partition, s0.es, "tpm_noninvasive_reverse");
  check_partition_matches(final_partition, st.es, "tpm_noninvasive_reverse");

  CoarseHamiltonian ch0 = coarse_energies(s0.es, initial_partition, beta);
  CoarseHamiltonian cht = coarse_energies(st.es, final_partition, beta);

  ReversedProtocol rp = reverse_protocol(protocol);
  ComplexMatrix v =
      conjugate_in_basis(reverse_propagator(rp, protocol.total_duration()));
  check_unitary(v, "tpm_noninvasive_reverse");

  const int n = h0.dim();
  std::vector<double> p_fine =
      overlap_probabilities(s0.es.eigenvectors, v, st.es.eigenvectors);
  for (int i = 0; i < n; ++i) {
    for (int m = 0; m < n; ++m) p_fine[size_t(i) * n + m] *= st.populations[m];
  }

  const int ni = initial_partition.slot_count();
  const int nf = final_partition.slot_count();
  std::vector<double> block(size_t(ni) * nf);
  kernels::block_sums(p_fine.data(), n, initial_partition.slots.data(), ni,
                      final_partition.slots.data(), nf, block.data());

  JointOutcomeTable t;
  t.rows = ni;
  t.cols = nf;
  t.initial_levels = ch0.energies;
  t.final_levels = cht.energies;
  t.beta = beta;
  t.delta_f = st.free_energy - s0.free_energy;
  t.probs = std::move(block);
  fill_work(t);
  return t;
}

double WorkDistribution::total() const {
  CompensatedSum acc;
  for (const auto& a : atoms) acc.add(a.p);
  return acc.value();
}

WorkDistribution work_distribution(const JointOutcomeTable& table, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("work_distribution: sign must be +-1");
  double scale = 0.0;
  for (double e : table.initial_levels) scale = std::max(scale, std::abs(e));
  for (double e : table.final_levels) scale = std::max(scale, std::abs(e));
  const double tol = 1e-9 * std::max(1.0, scale);

  std::vector<WorkAtom> raw;
  raw.reserve(table.probs.size());
  for (size_t k = 0; k < table.probs.size(); ++k) {
    raw.push_back({sign * table.work[k], table.probs[k]});
  }
  std::sort(raw.begin(), raw.end(),
            [](const WorkAtom& a, const WorkAtom& b) { return a.w < b.w; });

  WorkDistribution d;
  d.merge_tolerance = tol;
  size_t lo = 0;
  while (lo < raw.size()) {
    size_t hi = lo + 1;
    while (hi < raw.size() && raw[hi].w - raw[hi - 1].w <= tol) ++hi;
    CompensatedSum psum, wsum;
    for (size_t k = lo; k < hi; ++k) {
      psum.add(raw[k].p);
      wsum.add(raw[k].p * raw[k].w);
    }
    double p = psum.value();
    double w = p > 0.0 ? wsum.value() / p : 0.5 * (raw[lo].w + raw[hi - 1].w);
    d.atoms.push_back({w, p});
    lo = hi;
  }

  double total = d.total();
  if (total > 0.0) {
    for (auto& a : d.atoms) a.p /= total;
  }
  return d;
}

FTReport detailed_ft_check(const WorkDistribution& forward, const WorkDistribution& reverse,
                           double beta, double delta_f) {
  FTReport rep;
  const double match_tol =
      2.0 * std::max(forward.merge_tolerance, reverse.merge_tolerance);

  std::vector<bool> reverse_used(reverse.atoms.size(), false);
  for (const auto& atom : forward.atoms) {
    if (atom.p <= kAtomProbabilityCutoff) continue;
    // reverse atoms live at negated work values
    double target = -atom.w;
    int best = -1;
    double best_dist = match_tol;
    for (size_t k = 0; k < reverse.atoms.size(); ++k) {
      double dist = std::abs(reverse.atoms[k].w - target);
      if (dist <= best_dist) {
        best_dist = dist;
        best = int(k);
      }
    }
    if (best < 0 || reverse.atoms[best].p <= kAtomProbabilityCutoff) {
      // Below-cutoff partners are expected whenever the detailed theorem
      // itself predicts a reverse weight under the cutoff; only a partner
      // that should have been visible counts as a support inconsistency.
      double predicted = atom.p * std::exp(-beta * (atom.w - delta_f));
      if (predicted > 10.0 * kAtomProbabilityCutoff) ++rep.one_sided_atoms;
      continue;
    }
    reverse_used[best] = true;
    double log_ratio = std::log(atom.p) - std::log(reverse.atoms[best].p);
    double residual = std::abs(log_ratio - beta * (atom.w - delta_f));
    rep.atom_work.push_back(atom.w);
    rep.log_residuals.push_back(residual);
    rep.delta_f_estimates.push_back(atom.w - log_ratio / beta);
    rep.max_crooks_log_residual = std::max(rep.max_crooks_log_residual, residual);
  }
  for (size_t k = 0; k < reverse.atoms.size(); ++k) {
    if (reverse_used[k] || reverse.atoms[k].p <= kAtomProbabilityCutoff) continue;
    double predicted = reverse.atoms[k].p * std::exp(beta * (-reverse.atoms[k].w - delta_f));
    if (predicted > 10.0 * kAtomProbabilityCutoff) ++rep.one_sided_atoms;
  }

  rep.jarzynski_value = jarzynski_check(forward, beta, delta_f);
  rep.crooks_pass =
      rep.one_sided_atoms == 0 && rep.max_crooks_log_residual <= kCrooksTol;
  rep.jarzynski_pass = std::abs(rep.jarzynski_value - 1.0) <= kJarzynskiTol;
  return rep;
}

double jarzynski_check(const WorkDistribution& dist, double beta, double delta_f) {
  CompensatedSum acc;
  for (const auto& a : dist.atoms) acc.add(a.p * std::exp(-beta * (a.w - delta_f)));
  return acc.value();
}

double dissipated_work(const JointOutcomeTable& table) {
  return table.average_work() - table.delta_f;
}

double forward_reverse_relative_entropy(const Protocol& protocol,
                                        const SlotPartition& initial_partition,
                                        const SlotPartition& final_partition, double beta,
                                        double t) {
  const double tau = protocol.total_duration();
  if (t < -1e-12 || t > tau + 1e-12) {
    throw std::out_of_range("forward_reverse_relative_entropy: t outside [0, tau]");
  }
  CoarseThermalState cs0 =
      coarse_thermal_state(protocol.initial_hamiltonian(), initial_partition, beta);
  CoarseThermalState cst =
      coarse_thermal_state(protocol.final_hamiltonian(), final_partition, beta);

  ComplexMatrix u_t = forward_propagator(protocol, t);
  DensityMatrix rho_t = unitary_conjugate(u_t, cs0.state);

  ReversedProtocol rp = reverse_protocol(protocol);
  ComplexMatrix u_rev = reverse_propagator(rp, tau - t);
  DensityMatrix rev_init(HermitianOperator(conjugate_in_basis(cst.state.matrix())));
  DensityMatrix rho_rev = unitary_conjugate(u_rev, rev_init);
  DensityMatrix transported(HermitianOperator(conjugate_in_basis(rho_rev.matrix())));

  return relative_entropy(rho_t, transported);
}

NoninvasiveBoundReport noninvasive_bound_check(const Protocol& protocol,
                                               const SlotPartition& initial_partition,
                                               const SlotPartition& final_partition,
                                               double beta, double t) {
  const double tau = protocol.total_duration();
  if (t < -1e-12 || t > tau + 1e-12) {
    throw std::out_of_range("noninvasive_bound_check: t outside [0, tau]");
  }
  const HermitianOperator& h0 = protocol.initial_hamiltonian();
  const HermitianOperator& htau = protocol.final_hamiltonian();
  ThermalSide s0 = thermal_side(h0, beta);
  ThermalSide st = thermal_side(htau, beta);

  ThermalEnsemble g0 = gibbs_state(h0, beta);
  ThermalEnsemble gt = gibbs_state(htau, beta);
  double delta_f = gt.free_energy - g0.free_energy;

  ComplexMatrix u_t = forward_propagator(protocol, t);
  ComplexMatrix u_tau = forward_propagator(protocol, tau);
  ReversedProtocol rp = reverse_protocol(protocol);
  ComplexMatrix u_rev = reverse_propagator(rp, tau - t);

  auto transported_reverse = [&](const DensityMatrix& final_state) {
    DensityMatrix rev_init(
        HermitianOperator(conjugate_in_basis(final_state.matrix())));
    DensityMatrix rho_rev = unitary_conjugate(u_rev, rev_init);
    return DensityMatrix(HermitianOperator(conjugate_in_basis(rho_rev.matrix())));
  };

  NoninvasiveBoundReport rep;
  rep.beta = beta;

  // fine scheme
  DensityMatrix rho_t = unitary_conjugate(u_t, g0.state);
  DensityMatrix rho_tau = unitary_conjugate(u_tau, g0.state);
  double w_fine = average_energy(rho_tau, htau) - average_energy(g0.state, h0);
  rep.beta_wdiss_fine = beta * (w_fine - delta_f);
  rep.rel_entropy_fine = relative_entropy(rho_t, transported_reverse(gt.state));

  // projected (non-invasive) scheme
  DensityMatrix pinched0 = block_dephase(g0.state, initial_partition, s0.es.eigenvectors);
  DensityMatrix pinched_t = block_dephase(gt.state, final_partition, st.es.eigenvectors);
  DensityMatrix rho_bar_t = unitary_conjugate(u_t, pinched0);
  rep.rel_entropy_projected =
      relative_entropy(rho_bar_t, transported_reverse(pinched_t));

  CoarseHamiltonian ch0 = coarse_energies(s0.es, initial_partition, beta);
  CoarseHamiltonian cht = coarse_energies(st.es, final_partition, beta);
  DensityMatrix rho_bar_tau = unitary_conjugate(u_tau, pinched0);
  double w_bar = average_energy(rho_bar_tau, cht.to_operator()) -
                 average_energy(g0.state, ch0.to_operator());
  rep.wbar_minus_delta_f = w_bar - delta_f;
  return rep;
}

JointOutcomeTable brute_force_oracle(const HermitianOperator& h0,
                                     const HermitianOperator& htau,
                                     const SlotPartition& initial_partition,
                                     const SlotPartition& final_partition,
                                     const ComplexMatrix& u, double beta) {
  const int n = h0.dim();
  if (n > 6) throw std::invalid_argument("brute_force_oracle: dim must be <= 6");
  check_unitary(u, "brute_force_oracle");
  ThermalSide s0 = thermal_side(h0, beta);
  ThermalSide st = thermal_side(htau, beta);
  check_partition_matches(initial_partition, s0.es, "brute_force_oracle");
  check_partition_matches(final_partition, st.es, "brute_force_oracle");

  CoarseHamiltonian ch0 = coarse_energies(s0.es, initial_partition, beta);
  CoarseHamiltonian cht = coarse_energies(st.es, final_partition, beta);

  // Amplitudes <em(tau)|U|ek(0)> with plain loops, independent of the
  // kernel-based path.
  std::vector<cplx> amp(size_t(n) * n, cplx(0.0));
  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k) {
      cplx a = 0.0;
      for (int r = 0; r < n; ++r) {
        cplx row = 0.0;
        for (int c = 0; c < n; ++c) row += u(r, c) * s0.es.eigenvectors(c, k);
        a += std::conj(st.es.eigenvectors(r, m)) * row;
      }
      amp[size_t(m) * n + k] = a;
    }
  }

  const int ni = initial_partition.slot_count();
  const int nf = final_partition.slot_count();
  JointOutcomeTable t;
  t.rows = ni;
  t.cols = nf;
  t.initial_levels = ch0.energies;
  t.final_levels = cht.energies;
  t.beta = beta;
  t.delta_f = st.free_energy - s0.free_energy;
  t.probs.assign(size_t(ni) * nf, 0.0);

  for (int state = 0; state < n; ++state) {
    int slot_i = initial_partition.slot_of(state);
    double n_i = initial_partition.multiplicities[slot_i];
    for (int re = initial_partition.slots[slot_i].lo;
         re < initial_partition.slots[slot_i].hi; ++re) {
      double weight = s0.populations[state] / n_i;
      for (int m = 0; m < n; ++m) {
        int slot_j = final_partition.slot_of(m);
        t.probs[size_t(slot_i) * nf + slot_j] += weight * std::norm(amp[size_t(m) * n + re]);
      }
    }
  }
  fill_work(t);
  return t;
}

}  // namespace cgthermo
