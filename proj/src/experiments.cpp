#include "lsssc/experiments.hpp"

#include "lsssc/certificates.hpp"
#include "lsssc/clustering.hpp"
#include "lsssc/errors.hpp"
#include "lsssc/geometry.hpp"
#include "lsssc/rng.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace lsssc {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- config

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (threads < 0) throw ConfigError("threads must be non-negative");
  if (lambda && !(*lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (!(lambda_scale > 0.0)) throw ConfigError("lambda scale must be positive");
  for (double l : lambda_axis)
    if (!(l > 0.0)) throw ConfigError("lambda axis values must be positive");
  const NoiseKind kind = generator.noise.kind;
  if (!m_axis.empty() && kind != NoiseKind::Missing) {
    throw ConfigError("an m axis needs noise kind 'missing'");
  }
  if (!delta_axis.empty() && kind != NoiseKind::Ball && kind != NoiseKind::Adversarial) {
    throw ConfigError("a delta axis needs noise kind 'ball' or 'adversarial'");
  }
  if (bisect.enabled) {
    if (kind != NoiseKind::Missing) throw ConfigError("m bisection needs noise kind 'missing'");
    if (bisect.trials < 1) throw ConfigError("bisection needs at least one trial per probe");
    if (!(bisect.target > 0.0 && bisect.target <= 1.0)) {
      throw ConfigError("bisection target must lie in (0, 1]");
    }
    if (bisect.lo < 0 || (bisect.hi && *bisect.hi < bisect.lo)) {
      throw ConfigError("bisection range is empty");
    }
  }
  if (!(support_tol >= 0.0)) throw ConfigError("support_tol must be non-negative");
  try {
    solver.validate();
    for (const Cell& cell : expand_cells(*this)) {
      cell.generator.validate();
      if (bisect.enabled) {
        const int hi = bisect.hi.value_or(cell.n() - 1);
        if (hi >= cell.n()) throw ConfigError("bisection upper end must be below n");
      }
    }
  } catch (const InvalidParameter& ex) {
    throw ConfigError(ex.what());
  }
}

namespace {

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T read(const Json& j, const char* key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& ex) {
    throw ConfigError(std::string("bad value for '") + key + "': " + ex.what());
  }
}

}  // namespace

ExperimentConfig config_from_json(const Json& j) {
  reject_unknown(j,
                 {"generator", "lambda", "axes", "trials", "success", "bisect_m", "seed", "out",
                  "measure_geometry", "timing", "threads", "solver", "support_tol", "eigengap"},
                 "config");
  ExperimentConfig c;
  if (!j.contains("generator")) throw ConfigError("config needs a 'generator' section");
  try {
    c.generator = generator_config_from_json(j.at("generator"));
  } catch (const Json::exception& ex) {
    throw ConfigError(std::string("bad generator section: ") + ex.what());
  }
  if (j.contains("lambda")) {
    const Json& l = j.at("lambda");
    if (l.is_string()) {
      if (l.get<std::string>() != "auto") throw ConfigError("lambda must be a number or \"auto\"");
    } else if (l.is_object()) {
      reject_unknown(l, {"scale"}, "lambda");
      c.lambda_scale = read<double>(l, "scale", c.lambda_scale);
    } else if (l.is_number()) {
      c.lambda = l.get<double>();
    } else {
      throw ConfigError("lambda must be a number or \"auto\"");
    }
  }
  if (j.contains("axes")) {
    const Json& a = j.at("axes");
    reject_unknown(a, {"delta", "m", "d", "lambda", "n"}, "axes");
    c.delta_axis = read<std::vector<double>>(a, "delta", {});
    c.m_axis = read<std::vector<int>>(a, "m", {});
    c.d_axis = read<std::vector<int>>(a, "d", {});
    c.lambda_axis = read<std::vector<double>>(a, "lambda", {});
    c.n_axis = read<std::vector<int>>(a, "n", {});
  }
  c.trials = read<int>(j, "trials", 1);
  if (j.contains("success")) {
    const Json& s = j.at("success");
    reject_unknown(s, {"detection", "nontrivial", "clustering", "max_error"}, "success");
    c.success.detection = read<bool>(s, "detection", true);
    c.success.nontrivial = read<bool>(s, "nontrivial", true);
    c.success.clustering = read<bool>(s, "clustering", true);
    c.success.max_error = read<double>(s, "max_error", 0.0);
  }
  if (j.contains("bisect_m")) {
    const Json& b = j.at("bisect_m");
    reject_unknown(b, {"enabled", "trials", "target", "lo", "hi"}, "bisect_m");
    c.bisect.enabled = read<bool>(b, "enabled", true);
    c.bisect.trials = read<int>(b, "trials", 20);
    c.bisect.target = read<double>(b, "target", 0.9);
    c.bisect.lo = read<int>(b, "lo", 0);
    if (b.contains("hi")) c.bisect.hi = read<int>(b, "hi", 0);
  }
  c.seed = read<std::uint64_t>(j, "seed", 0);
  c.out = read<std::string>(j, "out", "results");
  c.measure_geometry = read<bool>(j, "measure_geometry", false);
  c.timing = read<bool>(j, "timing", false);
  c.threads = read<int>(j, "threads", 0);
  if (j.contains("solver")) {
    const Json& s = j.at("solver");
    reject_unknown(s, {"max_iterations", "tol", "rho", "polish"}, "solver");
    c.solver.max_iterations = read<int>(s, "max_iterations", c.solver.max_iterations);
    c.solver.primal_tol = c.solver.dual_tol = read<double>(s, "tol", c.solver.primal_tol);
    c.solver.rho = read<double>(s, "rho", c.solver.rho);
    c.solver.polish = read<bool>(s, "polish", c.solver.polish);
  }
  c.support_tol = read<double>(j, "support_tol", c.support_tol);
  try {
    c.gap_scale = gap_scale_from_string(read<std::string>(j, "eigengap", to_string(c.gap_scale)));
  } catch (const InvalidParameter& ex) {
    throw ConfigError(ex.what());
  }
  c.validate();
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["generator"] = to_json(c.generator);
  j["lambda"] = c.lambda ? Json(*c.lambda) : Json{{"scale", c.lambda_scale}};
  j["axes"] = Json{{"delta", c.delta_axis},
                   {"m", c.m_axis},
                   {"d", c.d_axis},
                   {"lambda", c.lambda_axis},
                   {"n", c.n_axis}};
  j["trials"] = c.trials;
  j["success"] = Json{{"detection", c.success.detection},
                      {"nontrivial", c.success.nontrivial},
                      {"clustering", c.success.clustering},
                      {"max_error", c.success.max_error}};
  Json b{{"enabled", c.bisect.enabled},
         {"trials", c.bisect.trials},
         {"target", c.bisect.target},
         {"lo", c.bisect.lo}};
  if (c.bisect.hi) b["hi"] = *c.bisect.hi;
  j["bisect_m"] = b;
  j["seed"] = c.seed;
  j["out"] = c.out.string();
  j["measure_geometry"] = c.measure_geometry;
  j["timing"] = c.timing;
  j["threads"] = c.threads;
  j["solver"] = Json{{"max_iterations", c.solver.max_iterations},
                     {"tol", c.solver.primal_tol},
                     {"rho", c.solver.rho},
                     {"polish", c.solver.polish}};
  j["support_tol"] = c.support_tol;
  j["eigengap"] = to_string(c.gap_scale);
  return j;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& ex) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + ex.what());
  }
  return config_from_json(j);
}

// ---------------------------------------------------------------- cells

int Cell::m() const {
  return generator.noise.kind == NoiseKind::Missing ? generator.missing_in(0) : 0;
}

std::vector<Cell> expand_cells(const ExperimentConfig& config) {
  const GeneratorConfig& base = config.generator;
  const auto or_base = [](auto axis, auto value) {
    if (axis.empty()) axis.push_back(value);
    return axis;
  };
  const std::vector<int> ns = or_base(config.n_axis, base.ambient_dim);
  const std::vector<int> ds = or_base(config.d_axis, base.dims.empty() ? 0 : base.dims.front());
  const std::vector<double> deltas = or_base(config.delta_axis, base.noise.delta);
  std::vector<int> ms = config.m_axis;
  if (ms.empty() || config.bisect.enabled) {
    ms = {base.noise.missing.empty() ? 0 : base.noise.missing.front()};
  }
  std::vector<double> lambdas = config.lambda_axis;
  const bool auto_lambda = lambdas.empty() && !config.lambda;
  if (lambdas.empty()) lambdas.push_back(config.lambda.value_or(0.0));

  std::vector<Cell> cells;
  for (int n : ns) {
    for (int d : ds) {
      for (double delta : deltas) {
        for (int m : ms) {
          for (double lambda : lambdas) {
            Cell cell;
            cell.cell_id = static_cast<long>(cells.size());
            cell.generator = base;
            cell.generator.ambient_dim = n;
            if (!config.d_axis.empty()) cell.generator.dims.assign(base.dims.size(), d);
            cell.generator.noise.delta = delta;
            if (base.noise.kind == NoiseKind::Missing &&
                (!config.m_axis.empty() || config.bisect.enabled)) {
              cell.generator.noise.missing = {m};
            }
            cell.lambda_auto = auto_lambda;
            cell.lambda = auto_lambda ? 0.0 : lambda;
            if (auto_lambda && !cell.generator.dims.empty() && cell.generator.kappas.size() ==
                                                                    cell.generator.dims.size()) {
              cell.lambda = config.lambda_scale *
                            random_model_lambda_scale(n, std::max(2, cell.generator.total_points()));
            }
            cell.measure_geometry = config.measure_geometry;
            cell.timing = config.timing;
            cell.solver = config.solver;
            cell.support_tol = config.support_tol;
            cell.gap_scale = config.gap_scale;
            cells.push_back(cell);
          }
        }
      }
    }
  }
  return cells;
}

// ---------------------------------------------------------------- trials

bool TrialResult::success(const SuccessCriteria& s) const {
  if (!failure.empty()) return false;
  if (s.detection && !detection) return false;
  if (s.nontrivial && !nontrivial) return false;
  if (s.clustering && clustering_error > s.max_error) return false;
  return true;
}

Json to_json(const TrialResult& t) {
  const auto opt = [](const auto& v) { return v ? Json(*v) : Json(nullptr); };
  return Json{{"cell_id", t.cell_id},
              {"trial", t.trial},
              {"seed", t.seed},
              {"n", t.n},
              {"N", t.N},
              {"L", t.L},
              {"d", t.d},
              {"kappa", t.kappa},
              {"delta", t.delta},
              {"m", t.m},
              {"lambda", t.lambda},
              {"detection", t.detection},
              {"false_positives", t.false_positives},
              {"nontrivial", t.nontrivial},
              {"L_hat", t.L_hat},
              {"clustering_error", t.clustering_error},
              {"r", opt(t.r)},
              {"mu", opt(t.mu)},
              {"wall_ms", opt(t.wall_ms)},
              {"criterion_holds", opt(t.criterion_holds)},
              {"lambda_in_interval", opt(t.lambda_in_interval)},
              {"failure", t.failure}};
}

TrialResult trial_result_from_json(const Json& j) {
  TrialResult t;
  try {
    t.cell_id = j.at("cell_id").get<long>();
    t.trial = j.at("trial").get<int>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.n = j.at("n").get<int>();
    t.N = j.at("N").get<int>();
    t.L = j.at("L").get<int>();
    t.d = j.at("d").get<int>();
    t.kappa = j.at("kappa").get<double>();
    t.delta = j.at("delta").get<double>();
    t.m = j.at("m").get<int>();
    t.lambda = j.at("lambda").get<double>();
    t.detection = j.at("detection").get<bool>();
    t.false_positives = j.at("false_positives").get<long>();
    t.nontrivial = j.at("nontrivial").get<bool>();
    t.L_hat = j.at("L_hat").get<int>();
    t.clustering_error = j.at("clustering_error").get<double>();
    if (!j.at("r").is_null()) t.r = j.at("r").get<double>();
    if (!j.at("mu").is_null()) t.mu = j.at("mu").get<double>();
    if (!j.at("wall_ms").is_null()) t.wall_ms = j.at("wall_ms").get<double>();
    if (!j.at("criterion_holds").is_null()) t.criterion_holds = j.at("criterion_holds").get<bool>();
    if (!j.at("lambda_in_interval").is_null()) {
      t.lambda_in_interval = j.at("lambda_in_interval").get<bool>();
    }
    t.failure = j.at("failure").get<std::string>();
  } catch (const Json::exception& ex) {
    throw ConfigError(std::string("malformed trial result: ") + ex.what());
  }
  return t;
}

TrialResult run_trial(const Cell& cell, int trial, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  TrialResult t;
  t.cell_id = cell.cell_id;
  t.trial = trial;
  t.seed = seed;
  t.n = cell.n();
  t.N = cell.N();
  t.L = cell.L();
  t.d = cell.d();
  t.kappa = cell.kappa();
  t.m = cell.m();
  t.lambda = cell.lambda;
  try {
    GeneratorConfig g = cell.generator;
    g.seed = seed;
    const Dataset data = generate_dataset(g);
    t.delta = data.Z.values().colwise().norm().maxCoeff();
    const LssscSolution sol = solve_lsssc(data.X, cell.lambda, cell.solver);
    const std::vector<int>& labels = data.truth.labels();
    const DetectionReport det = check_subspace_detection(sol.C, labels, cell.support_tol);
    t.detection = det.holds;
    t.false_positives = static_cast<long>(det.false_positives.size());
    t.nontrivial = check_nontrivial(sol.C, cell.support_tol).holds;
    const AffinityGraph graph = build_affinity(sol.C);
    if (graph.trivial) {
      t.L_hat = 0;
      t.clustering_error = 1.0;
    } else {
      t.L_hat = estimate_num_clusters(graph, cell.gap_scale);
      const SpectralResult sc = spectral_cluster(graph, t.L_hat, seed);
      t.clustering_error = clustering_error(sc.labels, labels, graph.isolated);
    }
    if (cell.measure_geometry) {
      const RadiiResult radii = compute_r(data.Y, data.truth);
      const IncoherenceResult inc =
          compute_incoherence(data.X, data.Y, data.truth, cell.lambda, cell.solver);
      t.r = radii.r;
      t.mu = inc.mu;
      const CriterionReport crit = deterministic_criterion(radii.r, inc.mu, t.delta);
      t.criterion_holds = crit.verdict;
      t.lambda_in_interval = crit.lambda_in_interval(cell.lambda);
    }
  } catch (const std::exception& ex) {
    t.failure = ex.what();
    t.detection = false;
    t.nontrivial = false;
    t.L_hat = 0;
    t.clustering_error = 1.0;
  }
  if (cell.timing) {
    t.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                    .count();
  }
  return t;
}

// ---------------------------------------------------------------- CSV

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

template <class Int>
bool parse_int(const std::string& s, Int& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  if constexpr (std::is_unsigned_v<Int>) {
    if (s.front() == '-') return false;
    out = static_cast<Int>(std::strtoull(s.c_str(), &end, 10));
  } else {
    out = static_cast<Int>(std::strtoll(s.c_str(), &end, 10));
  }
  return end == s.c_str() + s.size();
}

bool parse_bool(const std::string& s, bool& out) {
  if (s == "1") out = true;
  else if (s == "0") out = false;
  else return false;
  return true;
}

bool parse_optional(const std::string& s, std::optional<double>& out) {
  if (s.empty()) {
    out.reset();
    return true;
  }
  double v = 0.0;
  if (!parse_double(s, v)) return false;
  out = v;
  return true;
}

}  // namespace

std::string format_csv_row(const TrialResult& t) {
  std::ostringstream os;
  os << t.cell_id << ',' << t.trial << ',' << t.seed << ',' << t.n << ',' << t.N << ',' << t.L
     << ',' << t.d << ',' << fmt(t.kappa) << ',' << fmt(t.delta) << ',' << t.m << ','
     << fmt(t.lambda) << ',' << (t.detection ? 1 : 0) << ',' << t.false_positives << ','
     << (t.nontrivial ? 1 : 0) << ',' << t.L_hat << ',' << fmt(t.clustering_error) << ','
     << fmt(t.r) << ',' << fmt(t.mu) << ',' << fmt(t.wall_ms);
  return os.str();
}

std::optional<TrialResult> parse_csv_row(const std::string& line) {
  std::vector<std::string> f;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      f.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  f.push_back(cur);
  if (f.size() != 19) return std::nullopt;
  TrialResult t;
  const bool ok = parse_int(f[0], t.cell_id) && parse_int(f[1], t.trial) &&
                  parse_int(f[2], t.seed) && parse_int(f[3], t.n) && parse_int(f[4], t.N) &&
                  parse_int(f[5], t.L) && parse_int(f[6], t.d) && parse_double(f[7], t.kappa) &&
                  parse_double(f[8], t.delta) && parse_int(f[9], t.m) &&
                  parse_double(f[10], t.lambda) && parse_bool(f[11], t.detection) &&
                  parse_int(f[12], t.false_positives) && parse_bool(f[13], t.nontrivial) &&
                  parse_int(f[14], t.L_hat) && parse_double(f[15], t.clustering_error) &&
                  parse_optional(f[16], t.r) && parse_optional(f[17], t.mu) &&
                  parse_optional(f[18], t.wall_ms);
  if (!ok) return std::nullopt;
  return t;
}

// ---------------------------------------------------------------- sweep

std::vector<CellSummary> summarize(const std::vector<TrialResult>& rows,
                                   const SuccessCriteria& success) {
  std::map<long, CellSummary> by_cell;
  for (const TrialResult& t : rows) {
    CellSummary& s = by_cell[t.cell_id];
    s.cell_id = t.cell_id;
    ++s.trials;
    s.success_rate += t.success(success) ? 1.0 : 0.0;
    s.detection_rate += t.detection ? 1.0 : 0.0;
    s.nontrivial_rate += t.nontrivial ? 1.0 : 0.0;
    s.mean_error += t.clustering_error;
    s.mean_L_hat += t.L_hat;
  }
  std::vector<CellSummary> out;
  for (auto& [id, s] : by_cell) {
    const double k = s.trials;
    s.success_rate /= k;
    s.detection_rate /= k;
    s.nontrivial_rate /= k;
    s.mean_error /= k;
    s.mean_L_hat /= k;
    out.push_back(s);
  }
  return out;
}

namespace {

using Key = std::pair<long, int>;

struct Job {
  Cell cell;
  int trial;
  std::uint64_t seed;
};

class ResultStore {
 public:
  ResultStore(const fs::path& dir, const SweepOptions& options) : options_(options) {
    fs::create_directories(dir);
    csv_ = dir / "results.csv";
    load();
    // Drop any truncated tail now so appended rows start on a fresh line.
    rewrite();
    append_.open(csv_, std::ios::app);
    if (!append_) throw Error("cannot write " + csv_.string());
  }

  const TrialResult* find(const Key& key, std::uint64_t seed) const {
    const auto it = rows_.find(key);
    return it != rows_.end() && it->second.seed == seed ? &it->second : nullptr;
  }

  bool budget_left() const { return !options_.max_new_trials || computed_ < *options_.max_new_trials; }

  /// Runs the jobs that have no stored row; returns false when the budget cut
  /// the batch short.
  bool run(const std::vector<Job>& jobs) {
    std::vector<const Job*> pending;
    for (const Job& job : jobs) {
      if (find({job.cell.cell_id, job.trial}, job.seed)) {
        ++reused_;
      } else {
        pending.push_back(&job);
      }
    }
    bool complete = true;
    if (options_.max_new_trials) {
      const long left = std::max(0L, *options_.max_new_trials - computed_);
      if (static_cast<long>(pending.size()) > left) {
        pending.resize(static_cast<std::size_t>(left));
        complete = false;
      }
    }
    const long count = static_cast<long>(pending.size());
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < count; ++k) {
      const Job& job = *pending[k];
      TrialResult t = run_trial(job.cell, job.trial, job.seed);
#pragma omp critical(lsssc_result_store)
      {
        if (!t.failure.empty() && !options_.quiet) {
          std::cerr << "cell " << t.cell_id << " trial " << t.trial << ": " << t.failure << "\n";
        }
        append_ << format_csv_row(t) << '\n' << std::flush;
        rows_[{t.cell_id, t.trial}] = std::move(t);
        ++computed_;
      }
    }
    return complete;
  }

  std::vector<TrialResult> collect(const std::vector<Job>& jobs) const {
    std::vector<TrialResult> out;
    for (const Job& job : jobs)
      if (const TrialResult* t = find({job.cell.cell_id, job.trial}, job.seed)) out.push_back(*t);
    return out;
  }

  void rewrite() {
    const fs::path tmp = csv_.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) throw Error("cannot write " + tmp.string());
      out << kCsvHeader << '\n';
      for (const auto& [key, t] : rows_) out << format_csv_row(t) << '\n';
      if (!out) throw Error("failed writing " + tmp.string());
    }
    fs::rename(tmp, csv_);
  }

  void finish() {
    append_.close();
    rewrite();
  }

  std::vector<TrialResult> all() const {
    std::vector<TrialResult> out;
    for (const auto& [key, t] : rows_) out.push_back(t);
    return out;
  }

  long computed() const { return computed_; }
  long reused() const { return reused_; }

 private:
  void load() {
    std::ifstream in(csv_, std::ios::binary);
    if (!in) return;
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (text.empty()) return;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
      const std::size_t nl = text.find('\n', pos);
      if (nl == std::string::npos) break;  // unterminated last line
      const std::string line = text.substr(pos, nl - pos);
      pos = nl + 1;
      if (header) {
        if (line != kCsvHeader) throw ConfigError(csv_.string() + " has an unexpected header");
        header = false;
        continue;
      }
      if (auto t = parse_csv_row(line)) rows_[{t->cell_id, t->trial}] = *t;
    }
  }

  SweepOptions options_;
  fs::path csv_;
  std::ofstream append_;
  std::map<Key, TrialResult> rows_;
  long computed_ = 0;
  long reused_ = 0;
};

std::vector<Job> jobs_for(const Cell& cell, long seed_cell, int trials, std::uint64_t seed) {
  std::vector<Job> jobs;
  for (int t = 0; t < trials; ++t) {
    jobs.push_back(Job{cell, t, derive_seed(seed, static_cast<std::uint64_t>(seed_cell),
                                            static_cast<std::uint64_t>(t))});
  }
  return jobs;
}

double success_rate(const std::vector<TrialResult>& rows, const SuccessCriteria& s) {
  if (rows.empty()) return 0.0;
  double k = 0.0;
  for (const TrialResult& t : rows) k += t.success(s) ? 1.0 : 0.0;
  return k / static_cast<double>(rows.size());
}

// Returns false when the trial budget ran out.
bool bisect_cell(const ExperimentConfig& config, const Cell& base, long stride, ResultStore& store,
                 BisectionResult& result) {
  result.base_cell = base.cell_id;
  result.d = base.d();
  std::map<int, double> seen;
  const auto probe = [&](int m, double& rate) {
    Cell cell = base;
    cell.cell_id = base.cell_id * stride + m;
    cell.generator.noise.missing = {m};
    // Same seeds for every m: nested masks over a shared Y.
    const std::vector<Job> jobs = jobs_for(cell, base.cell_id, config.bisect.trials, config.seed);
    if (!store.run(jobs)) return false;
    rate = success_rate(store.collect(jobs), config.success);
    seen[m] = rate;
    result.probes.push_back(Probe{m, rate});
    return true;
  };
  int lo = config.bisect.lo;
  int hi = config.bisect.hi.value_or(base.n() - 1);
  double rate = 0.0;
  if (!probe(lo, rate)) return false;
  if (rate < config.bisect.target) {
    result.m_star = -1;
  } else {
    if (!probe(hi, rate)) return false;
    if (rate >= config.bisect.target) {
      lo = hi;
    } else {
      while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        if (!probe(mid, rate)) return false;
        (rate >= config.bisect.target ? lo : hi) = mid;
      }
    }
    result.m_star = lo;
  }
  for (auto a = seen.begin(); a != seen.end(); ++a)
    for (auto b = std::next(a); b != seen.end(); ++b)
      if (b->second > a->second) result.monotonicity_violations.emplace_back(a->first, b->first);
  return true;
}

Json summary_json(const ExperimentConfig& config, const SweepOutcome& outcome,
                  const std::vector<TrialResult>& rows) {
  std::map<long, const TrialResult*> first;
  for (const TrialResult& t : rows) first.emplace(t.cell_id, &t);
  Json cells = Json::array();
  for (const CellSummary& s : outcome.cells) {
    const TrialResult& t = *first.at(s.cell_id);
    cells.push_back(Json{{"cell_id", s.cell_id},
                         {"n", t.n},
                         {"N", t.N},
                         {"L", t.L},
                         {"d", t.d},
                         {"kappa", t.kappa},
                         {"m", t.m},
                         {"lambda", t.lambda},
                         {"trials", s.trials},
                         {"success_rate", s.success_rate},
                         {"detection_rate", s.detection_rate},
                         {"nontrivial_rate", s.nontrivial_rate},
                         {"mean_clustering_error", s.mean_error},
                         {"mean_L_hat", s.mean_L_hat}});
  }
  Json bis = Json::array();
  for (const BisectionResult& b : outcome.bisections) {
    Json probes = Json::array();
    for (const Probe& p : b.probes) probes.push_back(Json{{"m", p.m}, {"success_rate", p.success_rate}});
    Json viol = Json::array();
    for (const auto& [m1, m2] : b.monotonicity_violations) viol.push_back(Json::array({m1, m2}));
    bis.push_back(Json{{"base_cell", b.base_cell},
                       {"d", b.d},
                       {"m_star", b.m_star},
                       {"probes", probes},
                       {"monotonicity_violations", viol}});
  }
  return Json{{"version", kVersion},   {"csv_schema", kCsvSchema}, {"seed", config.seed},
              {"complete", outcome.complete}, {"config", to_json(config)}, {"cells", cells},
              {"m_star", bis}};
}

}  // namespace

SweepOutcome run_sweep(const ExperimentConfig& config, const SweepOptions& options) {
  config.validate();
  const std::vector<Cell> cells = expand_cells(config);
  ResultStore store(config.out, options);
  if (config.threads > 0) omp_set_num_threads(config.threads);
  omp_set_max_active_levels(1);

  SweepOutcome outcome;
  std::vector<Job> all_jobs;
  if (config.bisect.enabled) {
    long stride = 1;
    for (const Cell& c : cells) stride = std::max<long>(stride, c.n());
    for (const Cell& base : cells) {
      BisectionResult b;
      const bool done = bisect_cell(config, base, stride, store, b);
      outcome.bisections.push_back(b);
      if (!done) {
        outcome.complete = false;
        break;
      }
    }
    outcome.rows = store.all();
  } else {
    for (const Cell& cell : cells) {
      const std::vector<Job> jobs = jobs_for(cell, cell.cell_id, config.trials, config.seed);
      all_jobs.insert(all_jobs.end(), jobs.begin(), jobs.end());
    }
    outcome.complete = store.run(all_jobs);
    outcome.rows = store.collect(all_jobs);
  }
  store.finish();
  outcome.computed = store.computed();
  outcome.reused = store.reused();
  outcome.cells = summarize(outcome.rows, config.success);

  const fs::path summary = config.out / "summary.json";
  const fs::path tmp = summary.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << summary_json(config, outcome, outcome.rows).dump(2) << '\n';
  }
  fs::rename(tmp, summary);
  return outcome;
}

}  // namespace lsssc
