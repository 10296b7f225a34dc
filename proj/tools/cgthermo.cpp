// cgthermo: drive the coarse-grained two-point-measurement experiments from
// the command line and export their data as CSV/JSON (optionally SVG).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cgthermo/infothermo.hpp"
#include "cgthermo/io.hpp"
#include "cgthermo/tpm.hpp"
#include "cgthermo/verify.hpp"

namespace fs = std::filesystem;
using namespace cgthermo;
using nlohmann::json;

namespace {

constexpr int kExitBadConfig = 1;
constexpr int kExitInvariantFailure = 2;

struct Options {
  int levels = 12;
  double omega = 2.0;
  double hbar = 1.0;
  double kb = 1.0;
  std::optional<double> beta;
  std::optional<double> temp;
  double f = 0.0;
  std::string f_range;  // A:B:STEP
  double tau = 1.0;
  std::optional<double> alpha;
  std::optional<double> delta_eps;
  std::vector<int> slot_sizes;
  std::string out = "out";
  std::string format = "csv";
  uint64_t seed = 1;
  double inject_ej_perturbation = 0.0;
};

double resolve_beta(const Options& o, double fallback_temp) {
  if (o.beta && o.temp) throw CLI::ValidationError("--beta and --temp are exclusive");
  if (o.beta) {
    if (*o.beta <= 0) throw CLI::ValidationError("--beta must be positive");
    return *o.beta;
  }
  double t = o.temp ? *o.temp : fallback_temp;
  if (t <= 0) throw CLI::ValidationError("--temp must be positive");
  return 1.0 / (o.kb * t);
}

std::vector<double> resolve_f_values(const Options& o, const std::string& fallback) {
  std::string spec = o.f_range.empty() ? fallback : o.f_range;
  if (spec.empty()) return {o.f};
  double a, b, step;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &a, &b, &step) != 3 || step <= 0 || b < a) {
    throw CLI::ValidationError("--f-range must be A:B:STEP with STEP > 0 and B >= A");
  }
  std::vector<double> out;
  for (int k = 0;; ++k) {
    double v = a + k * step;
    if (v > b + 1e-12 * std::max(1.0, std::abs(b))) break;
    out.push_back(v);
  }
  return out;
}

// Exactly one of alpha / delta-eps / slot sizes selects the resolution;
// plain alpha = 3 is the default. A single slot entry that divides the
// dimension means uniform groups of that size.
struct Resolution {
  std::optional<double> delta_eps;
  std::vector<int> sizes;
};

Resolution resolve_partition_choice(const Options& o, const EigenSystem& initial_spectrum) {
  int given = int(bool(o.alpha)) + int(bool(o.delta_eps)) + int(!o.slot_sizes.empty());
  if (given > 1) {
    throw CLI::ValidationError("--alpha, --delta-eps and --slots are mutually exclusive");
  }
  Resolution r;
  if (o.delta_eps) {
    if (*o.delta_eps <= 0) throw CLI::ValidationError("--delta-eps must be positive");
    r.delta_eps = *o.delta_eps;
    return r;
  }
  if (!o.slot_sizes.empty()) {
    r.sizes = o.slot_sizes;
    int total = 0;
    for (int s : r.sizes) {
      if (s < 1) throw CLI::ValidationError("--slots entries must be positive");
      total += s;
    }
    if (r.sizes.size() == 1 && total != o.levels && o.levels % r.sizes.front() == 0) {
      r.sizes.assign(o.levels / r.sizes.front(), r.sizes.front());
      total = o.levels;
    }
    if (total != o.levels) {
      throw CLI::ValidationError("--slots sizes must sum to --levels");
    }
    return r;
  }
  double alpha = o.alpha ? *o.alpha : 3.0;
  if (alpha <= 0) throw CLI::ValidationError("--alpha must be positive");
  double gap = initial_spectrum.eigenvalues[1] - initial_spectrum.eigenvalues[0];
  r.delta_eps = alpha * gap;
  return r;
}

SlotPartition make_partition(const Resolution& r, const EigenSystem& spectrum) {
  return r.delta_eps ? build_slots(spectrum, *r.delta_eps) : explicit_slots(spectrum, r.sizes);
}

fs::path prepare_out_dir(const Options& o) {
  fs::path dir(o.out);
  fs::create_directories(dir);
  return dir;
}

struct Experiment {
  Protocol protocol;
  EigenSystem es0, est;
  SlotPartition p0, pt;
  double beta;
};

Experiment make_experiment(const Options& o, double f, double beta) {
  Protocol protocol = case_study_protocol(o.levels, o.omega, f, o.tau, o.hbar);
  EigenSystem es0 = hermitian_eig(protocol.initial_hamiltonian());
  EigenSystem est = hermitian_eig(protocol.final_hamiltonian());
  Resolution r = resolve_partition_choice(o, es0);
  SlotPartition p0 = make_partition(r, es0);
  SlotPartition pt = make_partition(r, est);
  return Experiment{std::move(protocol), std::move(es0), std::move(est), std::move(p0),
                    std::move(pt), beta};
}

json run_metadata(const Options& o, double beta) {
  return json{{"levels", o.levels}, {"omega", o.omega},   {"hbar", o.hbar},
              {"k_b", o.kb},        {"beta", beta},       {"tau", o.tau},
              {"seed", o.seed},     {"format", o.format}};
}

// ---------------------------------------------------------------------------

int cmd_states(const Options& o) {
  double beta = resolve_beta(o, 10.0);
  Experiment ex = make_experiment(o, 0.0, beta);
  fs::path dir = prepare_out_dir(o);

  ThermalEnsemble fine = gibbs_state(ex.protocol.initial_hamiltonian(), beta);
  CoarseThermalState coarse = coarse_thermal_state(ex.protocol.initial_hamiltonian(), ex.p0, beta);

  io::write_matrix_csv(fine.state.matrix(), false, dir / "state_fine_re.csv");
  io::write_matrix_csv(fine.state.matrix(), true, dir / "state_fine_im.csv");
  io::write_matrix_csv(coarse.state.matrix(), false, dir / "state_coarse_re.csv");
  io::write_matrix_csv(coarse.state.matrix(), true, dir / "state_coarse_im.csv");

  json meta = run_metadata(o, beta);
  meta["partition"] = io::partition_to_json(ex.p0, coarse.coarse_hamiltonian.energies, beta);
  meta["fine_free_energy"] = fine.free_energy;
  meta["coarse_free_energy"] = coarse.free_energy;
  meta["slot_probabilities"] = coarse.slot_probabilities;
  io::write_json(meta, dir / "states_meta.json");

  if (o.format == "svg") {
    io::SvgSeries pf{"fine population", {}, {}};
    io::SvgSeries pc{"coarse population", {}, {}};
    for (int j = 0; j < o.levels; ++j) {
      pf.x.push_back(j);
      pf.y.push_back(fine.state.matrix()(j, j).real());
      pc.x.push_back(j);
      pc.y.push_back(coarse.state.matrix()(j, j).real());
    }
    io::write_svg_plot({pf, pc}, "level", "population", dir / "states.svg");
  }
  return 0;
}

struct SweepRow {
  double f, w_fine, wdiss_fine, w_coarse, wdiss_coarse, s_fine, s_coarse;
};

SweepRow sweep_point(const Options& o, double f, double beta) {
  Experiment ex = make_experiment(o, f, beta);
  ComplexMatrix u = forward_propagator(ex.protocol, o.tau);
  JointOutcomeTable fine =
      tpm_fine(ex.protocol.initial_hamiltonian(), ex.protocol.final_hamiltonian(), u, beta);
  JointOutcomeTable coarse =
      tpm_coarse_forward(ex.protocol.initial_hamiltonian(), ex.protocol.final_hamiltonian(),
                         ex.p0, ex.pt, u, beta);
  SlotPartition fine0 = singleton_slots(ex.es0);
  SlotPartition finet = singleton_slots(ex.est);
  double s_fine = forward_reverse_relative_entropy(ex.protocol, fine0, finet, beta, o.tau / 2);
  double s_coarse = forward_reverse_relative_entropy(ex.protocol, ex.p0, ex.pt, beta, o.tau / 2);
  return SweepRow{f,
                  fine.average_work(),
                  dissipated_work(fine),
                  coarse.average_work(),
                  dissipated_work(coarse),
                  s_fine,
                  s_coarse};
}

int cmd_sweep_force(const Options& o) {
  double beta = resolve_beta(o, 1.0);
  std::vector<double> fs = resolve_f_values(o, "0:9.5:0.5");
  fs::path dir = prepare_out_dir(o);

  std::vector<SweepRow> rows(fs.size());
#pragma omp parallel for schedule(dynamic)
  for (size_t i = 0; i < fs.size(); ++i) rows[i] = sweep_point(o, fs[i], beta);

  io::CsvWriter csv({"f", "W_diss_fine", "W_diss_coarse", "S_rel_fine", "S_rel_coarse",
                     "W_avg_fine", "W_avg_coarse"});
  for (const auto& r : rows) {
    csv.add_row({r.f, r.wdiss_fine, r.wdiss_coarse, r.s_fine, r.s_coarse, r.w_fine, r.w_coarse});
  }
  csv.write(dir / "sweep_force.csv");

  // sign changes of (coarse - fine) dissipated work, linearly interpolated
  std::vector<double> crossings;
  for (size_t i = 1; i < rows.size(); ++i) {
    double a = rows[i - 1].wdiss_coarse - rows[i - 1].wdiss_fine;
    double b = rows[i].wdiss_coarse - rows[i].wdiss_fine;
    if (a == 0.0 && rows[i - 1].f == 0.0) continue;  // undriven point
    if ((a > 0 && b < 0) || (a < 0 && b > 0)) {
      crossings.push_back(rows[i - 1].f + (rows[i].f - rows[i - 1].f) * a / (a - b));
    }
  }
  json summary = run_metadata(o, beta);
  summary["rows"] = rows.size();
  summary["crossover_f"] = crossings.empty() ? json(nullptr) : json(crossings.front());
  summary["all_crossings"] = crossings;
  io::write_json(summary, dir / "sweep_force_summary.json");

  if (o.format == "svg") {
    io::SvgSeries wf{"W_diss fine", {}, {}}, wc{"W_diss coarse", {}, {}};
    for (const auto& r : rows) {
      wf.x.push_back(r.f);
      wf.y.push_back(r.wdiss_fine);
      wc.x.push_back(r.f);
      wc.y.push_back(r.wdiss_coarse);
    }
    io::write_svg_plot({wf, wc}, "f", "dissipated work", dir / "sweep_force.svg");
  }
  return 0;
}

void write_distribution_csv(const WorkDistribution& fwd, const WorkDistribution& rev,
                            const FTReport& rep, double beta, double delta_f,
                            const fs::path& path) {
  io::CsvWriter csv({"w", "p_forward", "p_reverse_neg", "ln_ratio", "beta_w_minus_dF"});
  for (const auto& atom : fwd.atoms) {
    double p_rev = 0.0;
    double best = 2.0 * std::max(fwd.merge_tolerance, rev.merge_tolerance);
    for (const auto& r : rev.atoms) {
      if (std::abs(r.w - (-atom.w)) <= best) {
        best = std::abs(r.w - (-atom.w));
        p_rev = r.p;
      }
    }
    double ln_ratio = (atom.p > kAtomProbabilityCutoff && p_rev > kAtomProbabilityCutoff)
                          ? std::log(atom.p / p_rev)
                          : std::numeric_limits<double>::quiet_NaN();
    csv.add_row({atom.w, atom.p, p_rev, ln_ratio, beta * (atom.w - delta_f)});
  }
  (void)rep;
  csv.write(path);
}

int cmd_distributions(const Options& o) {
  double beta = resolve_beta(o, 1.0);
  Experiment ex = make_experiment(o, o.f, beta);
  fs::path dir = prepare_out_dir(o);
  const auto& h0 = ex.protocol.initial_hamiltonian();
  const auto& ht = ex.protocol.final_hamiltonian();
  ComplexMatrix u = forward_propagator(ex.protocol, o.tau);

  SlotPartition fine0 = singleton_slots(ex.es0);
  SlotPartition finet = singleton_slots(ex.est);

  JointOutcomeTable fine_f = tpm_fine(h0, ht, u, beta);
  JointOutcomeTable fine_r = tpm_coarse_reverse(h0, ht, fine0, finet, ex.protocol, beta);
  JointOutcomeTable coarse_f = tpm_coarse_forward(h0, ht, ex.p0, ex.pt, u, beta);
  JointOutcomeTable coarse_r = tpm_coarse_reverse(h0, ht, ex.p0, ex.pt, ex.protocol, beta);

  WorkDistribution dfine_f = work_distribution(fine_f, +1);
  WorkDistribution dfine_r = work_distribution(fine_r, -1);
  WorkDistribution dcoarse_f = work_distribution(coarse_f, +1);
  WorkDistribution dcoarse_r = work_distribution(coarse_r, -1);

  FTReport rep_fine = detailed_ft_check(dfine_f, dfine_r, beta, fine_f.delta_f);
  FTReport rep_coarse = detailed_ft_check(dcoarse_f, dcoarse_r, beta, coarse_f.delta_f);

  write_distribution_csv(dfine_f, dfine_r, rep_fine, beta, fine_f.delta_f,
                         dir / "distributions_fine.csv");
  write_distribution_csv(dcoarse_f, dcoarse_r, rep_coarse, beta, coarse_f.delta_f,
                         dir / "distributions_coarse.csv");

  json rep = run_metadata(o, beta);
  rep["f"] = o.f;
  rep["delta_f"] = fine_f.delta_f;
  // continuum shift of a linearly driven ladder, for orientation only
  rep["delta_f_continuum_reference"] = -o.f * o.f / (2.0 * o.omega);
  rep["fine"] = io::ft_report_to_json(rep_fine);
  rep["coarse"] = io::ft_report_to_json(rep_coarse);
  rep["fine_forward"] = io::work_distribution_to_json(dfine_f);
  rep["fine_reverse"] = io::work_distribution_to_json(dfine_r);
  rep["coarse_forward"] = io::work_distribution_to_json(dcoarse_f);
  rep["coarse_reverse"] = io::work_distribution_to_json(dcoarse_r);
  io::write_json(rep, dir / "ft_report.json");

  if (o.format == "svg") {
    io::SvgSeries pf{"P(W) coarse fwd", {}, {}}, pr{"P(-W) coarse rev", {}, {}};
    for (const auto& a : dcoarse_f.atoms) {
      pf.x.push_back(a.w);
      pf.y.push_back(a.p);
    }
    for (const auto& a : dcoarse_r.atoms) {
      pr.x.push_back(-a.w);
      pr.y.push_back(a.p);
    }
    io::write_svg_plot({pf, pr}, "W", "probability", dir / "distributions.svg");
  }
  return 0;
}

int cmd_noninvasive(const Options& o) {
  double beta = resolve_beta(o, 1.0);
  std::vector<double> fs = resolve_f_values(o, "0:9.5:0.5");
  fs::path dir = prepare_out_dir(o);

  struct Row {
    double f, wdiss_fine, wdiss_invasive, wdiss_noninvasive;
    double s_fine, s_invasive, s_noninvasive;
  };
  std::vector<Row> rows(fs.size());
#pragma omp parallel for schedule(dynamic)
  for (size_t i = 0; i < fs.size(); ++i) {
    const double f = fs[i];
    Experiment ex = make_experiment(o, f, beta);
    const auto& h0 = ex.protocol.initial_hamiltonian();
    const auto& ht = ex.protocol.final_hamiltonian();
    ComplexMatrix u = forward_propagator(ex.protocol, o.tau);
    JointOutcomeTable fine = tpm_fine(h0, ht, u, beta);
    JointOutcomeTable inv = tpm_coarse_forward(h0, ht, ex.p0, ex.pt, u, beta);
    JointOutcomeTable ninv = tpm_noninvasive(h0, ht, ex.p0, ex.pt, u, beta);
    NoninvasiveBoundReport bound =
        noninvasive_bound_check(ex.protocol, ex.p0, ex.pt, beta, o.tau / 2);
    double s_invasive =
        forward_reverse_relative_entropy(ex.protocol, ex.p0, ex.pt, beta, o.tau / 2);
    rows[i] = Row{f,
                  dissipated_work(fine),
                  dissipated_work(inv),
                  dissipated_work(ninv),
                  bound.rel_entropy_fine / beta,
                  s_invasive / beta,
                  bound.rel_entropy_projected / beta};
  }

  io::CsvWriter csv({"f", "W_diss_fine", "W_diss_invasive", "W_diss_noninvasive",
                     "S_rel_fine_over_beta", "S_rel_invasive_over_beta",
                     "S_rel_noninvasive_over_beta"});
  for (const auto& r : rows) {
    csv.add_row({r.f, r.wdiss_fine, r.wdiss_invasive, r.wdiss_noninvasive, r.s_fine,
                 r.s_invasive, r.s_noninvasive});
  }
  csv.write(dir / "noninvasive.csv");

  json summary = run_metadata(o, beta);
  summary["rows"] = rows.size();
  io::write_json(summary, dir / "noninvasive_summary.json");

  if (o.format == "svg") {
    io::SvgSeries a{"W_diss noninvasive", {}, {}}, b{"S_rel/beta noninvasive", {}, {}};
    for (const auto& r : rows) {
      a.x.push_back(r.f);
      a.y.push_back(r.wdiss_noninvasive);
      b.x.push_back(r.f);
      b.y.push_back(r.s_noninvasive);
    }
    io::write_svg_plot({a, b}, "f", "energy", dir / "noninvasive.svg");
  }
  return 0;
}

int cmd_verify(const Options& o) {
  fs::path dir = prepare_out_dir(o);
  VerifyOptions vo;
  vo.seed = o.seed;
  vo.inject_energy_perturbation = o.inject_ej_perturbation;
  std::vector<InvariantResult> results = run_invariant_suites(vo);

  json rep = json::array();
  int failures = 0;
  for (const auto& r : results) {
    rep.push_back({{"invariant", r.name},
                   {"instances", r.instances},
                   {"max_residual", r.max_residual},
                   {"tolerance", r.tolerance},
                   {"pass", r.pass}});
    if (!r.pass) ++failures;
    std::printf("%-55s instances=%-5d max_residual=%.3e %s\n", r.name.c_str(), r.instances,
                r.max_residual, r.pass ? "PASS" : "FAIL");
  }
  json out = run_metadata(o, o.beta ? *o.beta : 1.0);
  out["invariants"] = rep;
  out["failures"] = failures;
  io::write_json(out, dir / "verify_report.json");
  return failures == 0 ? 0 : kExitInvariantFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coarse-grained quantum work statistics toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file; flags override it");

  Options o;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--levels", o.levels, "truncated ladder dimension")->check(CLI::Range(2, 4096));
    cmd->add_option("--omega", o.omega, "oscillator frequency");
    cmd->add_option("--hbar", o.hbar, "reduced Planck constant");
    cmd->add_option("--kB", o.kb, "Boltzmann constant");
    cmd->add_option("--beta", o.beta, "inverse temperature");
    cmd->add_option("--temp", o.temp, "temperature (exclusive with --beta)");
    cmd->add_option("--f", o.f, "driving force amplitude");
    cmd->add_option("--f-range", o.f_range, "sweep A:B:STEP");
    cmd->add_option("--tau", o.tau, "quench duration");
    cmd->add_option("--alpha", o.alpha, "resolution as a multiple of the level spacing");
    cmd->add_option("--delta-eps", o.delta_eps, "absolute energy resolution");
    cmd->add_option("--slots", o.slot_sizes, "explicit slot sizes (or one uniform size)")
        ->delimiter(',');
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--format", o.format, "csv|json|svg")
        ->check(CLI::IsMember({"csv", "json", "svg"}));
    cmd->add_option("--seed", o.seed, "seed for randomized suites");
    return cmd;
  };

  auto* states = add_common(app.add_subcommand("states", "thermal state matrices"));
  auto* sweep = add_common(app.add_subcommand("sweep-force", "dissipated work vs drive"));
  auto* dist = add_common(app.add_subcommand("distributions", "work distributions and FT report"));
  auto* ninv = add_common(app.add_subcommand("noninvasive", "projected-scheme comparison"));
  auto* verify = add_common(app.add_subcommand("verify", "run all invariant suites"));
  verify->add_option("--inject-ej-perturbation", o.inject_ej_perturbation,
                     "shift coarse levels to force a consistency failure (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitBadConfig;
  }

  try {
    if (states->parsed()) return cmd_states(o);
    if (sweep->parsed()) return cmd_sweep_force(o);
    if (dist->parsed()) return cmd_distributions(o);
    if (ninv->parsed()) return cmd_noninvasive(o);
    if (verify->parsed()) return cmd_verify(o);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadConfig;
  }
  return kExitBadConfig;
}
