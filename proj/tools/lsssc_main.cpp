// Command-line front end: trial, sweep, geometry, certify.

#include "lsssc/certificates.hpp"
#include "lsssc/errors.hpp"
#include "lsssc/experiments.hpp"
#include "lsssc/geometry.hpp"
#include "lsssc/rng.hpp"
#include "lsssc/serialize.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace lsssc;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitAssert = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> lambda;
  std::optional<std::string> out;
  int threads = 0;
  bool measure_geometry = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON experiment config")->required()->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "master seed (overrides the config)");
  app->add_option("--lambda", c.lambda, "regularization weight, or 'auto'");
  app->add_option("--threads", c.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
}

ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg = load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.lambda) {
    if (*c.lambda == "auto") {
      cfg.lambda.reset();
    } else {
      try {
        std::size_t used = 0;
        cfg.lambda = std::stod(*c.lambda, &used);
        if (used != c.lambda->size()) throw std::invalid_argument("trailing text");
      } catch (const std::exception&) {
        throw ConfigError("--lambda expects a number or 'auto', got '" + *c.lambda + "'");
      }
    }
    cfg.lambda_axis.clear();
  }
  if (c.out) cfg.out = *c.out;
  if (c.threads > 0) cfg.threads = c.threads;
  if (c.measure_geometry) cfg.measure_geometry = true;
  cfg.validate();
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
  return cfg;
}

// First cell of the grid with the generator seed taken from the master seed.
Dataset first_dataset(const ExperimentConfig& cfg, Cell& cell) {
  cell = expand_cells(cfg).front();
  GeneratorConfig g = cell.generator;
  g.seed = cfg.seed;
  return generate_dataset(g);
}

int cmd_trial(const Common& c, int index, bool assert_recovery) {
  const ExperimentConfig cfg = load(c);
  const Cell cell = expand_cells(cfg).front();
  const TrialResult t = run_trial(cell, index, derive_seed(cfg.seed, 0, static_cast<std::uint64_t>(index)));
  std::cout << to_json(t).dump(2) << "\n";
  if (!t.failure.empty()) return kExitRuntime;
  if (assert_recovery && !t.success(cfg.success)) return kExitAssert;
  return kExitOk;
}

int cmd_sweep(const Common& c, std::optional<double> min_success, std::optional<long> max_new) {
  const ExperimentConfig cfg = load(c);
  SweepOptions opts;
  opts.quiet = false;
  opts.max_new_trials = max_new;
  const SweepOutcome out = run_sweep(cfg, opts);
  std::cout << "rows " << out.rows.size() << " (computed " << out.computed << ", reused "
            << out.reused << ")" << (out.complete ? "" : ", interrupted") << "\n";
  for (const CellSummary& s : out.cells) {
    std::cout << "cell " << s.cell_id << ": success " << s.success_rate << " over " << s.trials
              << " trials, mean error " << s.mean_error << "\n";
  }
  for (const BisectionResult& b : out.bisections) {
    std::cout << "base cell " << b.base_cell << " d=" << b.d << ": m* = " << b.m_star;
    if (!b.monotonicity_violations.empty()) {
      std::cout << " (" << b.monotonicity_violations.size() << " monotonicity violations)";
    }
    std::cout << "\n";
  }
  std::cout << "wrote " << (cfg.out / "results.csv").string() << " and "
            << (cfg.out / "summary.json").string() << "\n";
  if (!out.complete) return kExitRuntime;
  if (min_success) {
    for (const CellSummary& s : out.cells)
      if (s.success_rate < *min_success) return kExitAssert;
  }
  return kExitOk;
}

int cmd_geometry(const Common& c, bool assert_criterion) {
  const ExperimentConfig cfg = load(c);
  Cell cell;
  const Dataset data = first_dataset(cfg, cell);
  const RadiiResult radii = compute_r(data.Y, data.truth);
  const IncoherenceResult inc = compute_incoherence(data.X, data.Y, data.truth, cell.lambda, cfg.solver);
  GeometrySummary g;
  g.r_ell = radii.r_ell;
  g.r = radii.r;
  g.mu_ell = inc.mu_ell;
  g.mu = inc.mu;
  g.delta = data.Z.values().colwise().norm().maxCoeff();
  const CriterionReport crit = deterministic_criterion(g.r, g.mu, g.delta);
  g.lambda_lo = crit.lambda_lo.value_or(0.0);
  g.lambda_hi = crit.lambda_hi.value_or(0.0);
  g.criterion_holds = crit.verdict;
  Json out{{"summary", to_json(g)},
           {"criterion", to_json(crit)},
           {"lambda", cell.lambda},
           {"lambda_in_interval", crit.lambda_in_interval(cell.lambda)},
           {"inradius_exact", radii.exact},
           {"degenerate_columns", radii.any_degenerate},
           {"incoherence_undefined", inc.undefined},
           {"skipped_duals", inc.skipped}};
  std::cout << out.dump(2) << "\n";
  if (assert_criterion && !(crit.verdict && crit.lambda_in_interval(cell.lambda))) return kExitAssert;
  return kExitOk;
}

int cmd_certify(const Common& c, bool assert_certificate) {
  const ExperimentConfig cfg = load(c);
  Cell cell;
  const Dataset data = first_dataset(cfg, cell);
  const std::vector<int>& labels = data.truth.labels();
  int passed = 0;
  int near = 0;
  double worst_margin = 1.0;
  Json failing = Json::array();
  for (Index i = 0; i < data.X.cols(); ++i) {
    const DualCertificate cert =
        construct_dual_certificate(data.X.values(), labels, i, cell.lambda, cfg.solver);
    worst_margin = std::min(worst_margin, cert.check.foreign_margin);
    if (cert.check.all()) {
      ++passed;
    } else {
      if (cert.check.near_boundary) ++near;
      failing.push_back(Json{{"column", i},
                             {"sign_match", cert.check.sign_match},
                             {"nu_is_lambda_e", cert.check.nu_is_lambda_e},
                             {"same_subspace_bound", cert.check.same_subspace_bound},
                             {"foreign_margin", cert.check.foreign_margin}});
    }
  }
  Json out{{"lambda", cell.lambda},
           {"columns", data.X.cols()},
           {"certified", passed},
           {"near_boundary", near},
           {"worst_foreign_margin", worst_margin},
           {"failing", failing}};
  const GeneratorConfig& g = cell.generator;
  bool kappas_ok = true;
  for (double k : g.kappas) kappas_ok = kappas_ok && k > 1.0;
  if (kappas_ok) {
    std::vector<double> kappas = g.kappas;
    out["random_model"] = to_json(random_model_criteria(g.ambient_dim, g.total_points(), g.dims,
                                                        kappas, data.Z.values().colwise().norm().maxCoeff()));
    const MissingDataReport md = missing_data_criteria(g.ambient_dim, g.total_points(), g.dims, kappas);
    out["missing_data"] = to_json(md.report);
    out["missing_caps"] = md.cap;
  }
  std::cout << out.dump(2) << "\n";
  if (assert_certificate && passed != data.X.cols()) return kExitAssert;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse subspace clustering with a least-squares fit: trials, sweeps and diagnostics"};
  app.require_subcommand(1);

  Common trial_c, sweep_c, geom_c, cert_c;
  int trial_index = 0;
  bool assert_recovery = false;
  auto* trial = app.add_subcommand("trial", "run one trial of the first grid cell");
  add_common(trial, trial_c);
  trial->add_flag("--measure-geometry", trial_c.measure_geometry, "also measure r and mu");
  trial->add_option("--trial", trial_index, "trial index")->check(CLI::NonNegativeNumber);
  trial->add_flag("--assert-recovery", assert_recovery, "exit 3 unless the trial succeeds");

  std::optional<double> min_success;
  std::optional<long> max_new;
  auto* sweep = app.add_subcommand("sweep", "run or resume a parameter sweep");
  add_common(sweep, sweep_c);
  sweep->add_option("--out", sweep_c.out, "output directory");
  sweep->add_flag("--measure-geometry", sweep_c.measure_geometry, "also measure r and mu");
  sweep->add_option("--assert-min-success", min_success, "exit 3 if a cell's success rate is lower")
      ->check(CLI::Range(0.0, 1.0));
  sweep->add_option("--max-new-trials", max_new, "stop after computing this many trials");

  bool assert_criterion = false;
  auto* geometry = app.add_subcommand("geometry", "measure r, mu and delta on one dataset");
  add_common(geometry, geom_c);
  geometry->add_flag("--assert-criterion", assert_criterion,
                     "exit 3 unless the deterministic criterion holds at lambda");

  bool assert_certificate = false;
  auto* certify = app.add_subcommand("certify", "build and check dual certificates on one dataset");
  add_common(certify, cert_c);
  certify->add_flag("--assert-certificate", assert_certificate,
                    "exit 3 unless every column is certified");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*trial) return cmd_trial(trial_c, trial_index, assert_recovery);
    if (*sweep) return cmd_sweep(sweep_c, min_success, max_new);
    if (*geometry) return cmd_geometry(geom_c, assert_criterion);
    if (*certify) return cmd_certify(cert_c, assert_certificate);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
