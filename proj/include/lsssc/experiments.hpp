#pragma once

#include "lsssc/clustering.hpp"
#include "lsssc/generator.hpp"
#include "lsssc/serialize.hpp"
#include "lsssc/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lsssc {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kCsvSchema = 1;
inline constexpr const char* kCsvHeader =
    "cell_id,trial,seed,n,N,L,d,kappa,delta,m,lambda,detection,false_positives,nontrivial,"
    "L_hat,clustering_error,r,mu,wall_ms";

struct SuccessCriteria {
  bool detection = true;
  bool nontrivial = true;
  bool clustering = true;
  double max_error = 0.0;
};

struct BisectionSpec {
  bool enabled = false;
  int trials = 20;
  double target = 0.9;
  int lo = 0;
  /// Upper end of the search; defaults to n - 1.
  std::optional<int> hi;
};

struct ExperimentConfig {
  GeneratorConfig generator;
  /// nullopt selects lambda_scale * sqrt(n/(6 log N)) per cell.
  std::optional<double> lambda;
  double lambda_scale = 2.0;
  std::vector<double> delta_axis;
  std::vector<int> m_axis;
  std::vector<int> d_axis;
  std::vector<double> lambda_axis;
  std::vector<int> n_axis;
  int trials = 1;
  SuccessCriteria success;
  BisectionSpec bisect;
  std::uint64_t seed = 0;
  std::filesystem::path out = "results";
  bool measure_geometry = false;
  bool timing = false;
  int threads = 0;
  SolverOptions solver;
  /// Absolute threshold for calling an entry of C nonzero.
  double support_tol = 1e-6;
  GapScale gap_scale = GapScale::Log;

  void validate() const;
};

/// Throws ConfigError on malformed input.
ExperimentConfig config_from_json(const Json& j);
Json to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);

/// One point of the sweep grid.
struct Cell {
  long cell_id = 0;
  GeneratorConfig generator;
  double lambda = 0.0;
  bool lambda_auto = false;
  bool measure_geometry = false;
  bool timing = false;
  SolverOptions solver;
  double support_tol = 1e-6;
  GapScale gap_scale = GapScale::Log;

  int n() const { return generator.ambient_dim; }
  int N() const { return generator.total_points(); }
  int L() const { return generator.num_subspaces(); }
  int d() const { return generator.dims.front(); }
  double kappa() const { return generator.kappas.front(); }
  int m() const;
};

/// Cartesian product of the axes in the order n, d, delta, m, lambda. With
/// bisection enabled the m axis is left out.
std::vector<Cell> expand_cells(const ExperimentConfig& config);

struct TrialResult {
  long cell_id = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  int n = 0;
  int N = 0;
  int L = 0;
  int d = 0;
  double kappa = 0.0;
  /// Measured max_i ||z_i||.
  double delta = 0.0;
  int m = 0;
  double lambda = 0.0;
  bool detection = false;
  long false_positives = 0;
  bool nontrivial = false;
  int L_hat = 0;
  double clustering_error = 1.0;
  std::optional<double> r;
  std::optional<double> mu;
  std::optional<double> wall_ms;
  /// Deterministic criterion verdict and lambda-in-interval, when measured.
  std::optional<bool> criterion_holds;
  std::optional<bool> lambda_in_interval;
  /// Message of a component error caught during the trial.
  std::string failure;

  bool success(const SuccessCriteria& s) const;
};

Json to_json(const TrialResult& t);
TrialResult trial_result_from_json(const Json& j);

/// generate -> solve -> verify -> cluster. Deterministic in (cell, seed);
/// component errors end up in `failure`.
TrialResult run_trial(const Cell& cell, int trial, std::uint64_t seed);

/// %.17g formatting so that parse -> format is the identity.
std::string format_csv_row(const TrialResult& t);
/// nullopt for malformed or truncated rows.
std::optional<TrialResult> parse_csv_row(const std::string& line);

struct CellSummary {
  long cell_id = 0;
  int trials = 0;
  double success_rate = 0.0;
  double detection_rate = 0.0;
  double nontrivial_rate = 0.0;
  double mean_error = 0.0;
  double mean_L_hat = 0.0;
};

struct Probe {
  int m = 0;
  double success_rate = 0.0;
};

struct BisectionResult {
  long base_cell = 0;
  int d = 0;
  /// Largest m with success >= target; -1 when even the lower end fails.
  int m_star = -1;
  std::vector<Probe> probes;
  /// (m1, m2) with m1 < m2 and success(m2) > success(m1).
  std::vector<std::pair<int, int>> monotonicity_violations;
};

struct SweepOptions {
  /// Stop after this many newly computed trials (simulates interruption).
  std::optional<long> max_new_trials;
  bool quiet = true;
};

struct SweepOutcome {
  std::vector<TrialResult> rows;
  std::vector<CellSummary> cells;
  std::vector<BisectionResult> bisections;
  long computed = 0;
  long reused = 0;
  bool complete = true;
};

/// Runs every (cell, trial), resuming from rows already in out/results.csv,
/// then rewrites results.csv sorted by (cell_id, trial) and writes
/// summary.json. Throws std::filesystem::filesystem_error or Error when the
/// output directory is unusable, before computing anything.
SweepOutcome run_sweep(const ExperimentConfig& config, const SweepOptions& options = {});

std::vector<CellSummary> summarize(const std::vector<TrialResult>& rows,
                                   const SuccessCriteria& success);

}  // namespace lsssc
