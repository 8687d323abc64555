#include "lsssc/certificates.hpp"
#include "lsssc/errors.hpp"
#include "lsssc/experiments.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lsssc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lsssc_test_experiments_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Json small_config() {
  return Json::parse(R"({
    "generator": {"n": 20, "dims": [2, 2], "kappas": 5, "noise": {"kind": "none"}},
    "lambda": "auto",
    "trials": 5,
    "seed": 3
  })");
}

Cell single_cell(const Json& j) {
  const std::vector<Cell> cells = expand_cells(config_from_json(j));
  REQUIRE(cells.size() == 1);
  return cells.front();
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = config_from_json(small_config());
  CHECK(c.trials == 5);
  CHECK(!c.lambda.has_value());
  CHECK(c.generator.ambient_dim == 20);
  CHECK(c.gap_scale == GapScale::Log);
  const ExperimentConfig back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));

  SUBCASE("errors") {
    Json j = small_config();
    j["bogus"] = 1;
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
    j = small_config();
    j["trials"] = 0;
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
    j = small_config();
    j["lambda"] = "sometimes";
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
    j = small_config();
    j["lambda"] = -2.0;
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
    j = small_config();
    j["eigengap"] = "cubic";
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
    j = small_config();
    j["axes"] = {{"m", {1, 2}}};
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
    j = small_config();
    j["generator"]["dims"] = {30, 2};
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
    j = small_config();
    j.erase("generator");
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  }
}

TEST_CASE("lambda policies") {
  Json j = small_config();
  CHECK(single_cell(j).lambda == doctest::Approx(default_lambda(20, 20)));
  CHECK(single_cell(j).lambda_auto);
  j["lambda"] = {{"scale", 3.0}};
  CHECK(single_cell(j).lambda == doctest::Approx(3.0 * random_model_lambda_scale(20, 20)));
  j["lambda"] = 7.5;
  CHECK(single_cell(j).lambda == 7.5);
  CHECK(!single_cell(j).lambda_auto);
}

TEST_CASE("grid expansion") {
  Json j = small_config();
  j["generator"]["noise"] = {{"kind", "ball"}, {"delta", 0.0}};
  j["axes"] = {{"d", {1, 2}}, {"delta", {0.0, 0.1, 0.2}}, {"lambda", {3.0, 6.0}}};
  const std::vector<Cell> cells = expand_cells(config_from_json(j));
  REQUIRE(cells.size() == 12);
  for (std::size_t k = 0; k < cells.size(); ++k) CHECK(cells[k].cell_id == static_cast<long>(k));
  CHECK(cells[0].d() == 1);
  CHECK(cells[11].d() == 2);
  CHECK(cells[1].lambda == 6.0);
  CHECK(cells[2].generator.noise.delta == 0.1);
}

TEST_CASE("noiseless well-separated trials succeed") {
  Json j = small_config();
  j["generator"]["n"] = 40;
  j["generator"]["dims"] = {1, 1};
  j["measure_geometry"] = true;
  const Cell cell = single_cell(j);
  for (int trial = 0; trial < 10; ++trial) {
    const TrialResult t = run_trial(cell, trial, 11 + trial);
    CHECK(t.failure.empty());
    CHECK(t.detection);
    CHECK(t.false_positives == 0);
    CHECK(t.nontrivial);
    CHECK(t.L_hat == 2);
    CHECK(t.clustering_error == 0.0);
    CHECK(t.delta == 0.0);
    REQUIRE(t.r.has_value());
    REQUIRE(t.mu.has_value());
    CHECK(*t.r == doctest::Approx(1.0));
    CHECK(*t.mu >= 0.0);
    CHECK(t.criterion_holds.has_value());
    CHECK(t.success(SuccessCriteria{}));
  }
}

TEST_CASE("huge noise fails gracefully") {
  Json j = small_config();
  j["generator"]["noise"] = {{"kind", "ball"}, {"delta", 2.0}};
  const TrialResult t = run_trial(single_cell(j), 0, 5);
  CHECK(t.failure.empty());
  CHECK(!t.detection);
  CHECK(t.false_positives > 0);
  CHECK(t.delta <= 2.0);
  CHECK(t.clustering_error >= 0.0);
  CHECK(t.clustering_error <= 1.0);
}

TEST_CASE("trials are deterministic") {
  Json j = small_config();
  j["generator"]["noise"] = {{"kind", "missing"}, {"missing", 5}};
  const Cell cell = single_cell(j);
  const TrialResult a = run_trial(cell, 2, 99);
  const TrialResult b = run_trial(cell, 2, 99);
  CHECK(format_csv_row(a) == format_csv_row(b));
  CHECK(a.m == 5);
  CHECK(format_csv_row(run_trial(cell, 2, 100)) != format_csv_row(a));
}

TEST_CASE("csv rows round trip") {
  TrialResult t;
  t.cell_id = 3;
  t.trial = 7;
  t.seed = 18446744073709551557ULL;
  t.n = 100;
  t.N = 32;
  t.L = 2;
  t.d = 2;
  t.kappa = 8.0;
  t.delta = 0.1 + 0.2;
  t.m = 13;
  t.lambda = std::sqrt(2.0);
  t.detection = true;
  t.false_positives = 0;
  t.nontrivial = false;
  t.L_hat = 3;
  t.clustering_error = 1.0 / 3.0;
  t.mu = 1e-300;
  const std::string line = format_csv_row(t);
  const auto back = parse_csv_row(line);
  REQUIRE(back.has_value());
  CHECK(format_csv_row(*back) == line);
  CHECK(back->seed == t.seed);
  CHECK(back->delta == t.delta);
  CHECK(back->lambda == t.lambda);
  CHECK(!back->r.has_value());
  CHECK(*back->mu == 1e-300);
  CHECK(!parse_csv_row(line.substr(0, line.size() - 4)).has_value());
  CHECK(!parse_csv_row("").has_value());
  CHECK(!parse_csv_row("a,b,c").has_value());

  const TrialResult j = trial_result_from_json(Json::parse(to_json(t).dump()));
  CHECK(format_csv_row(j) == line);
}

TEST_CASE("single-cell sweep shape and summary") {
  Json j = small_config();
  j["out"] = scratch("shape").string();
  const SweepOutcome o = run_sweep(config_from_json(j));
  CHECK(o.rows.size() == 5);
  REQUIRE(o.cells.size() == 1);
  CHECK(o.cells[0].trials == 5);
  CHECK(o.complete);
  double mean = 0.0;
  for (const TrialResult& t : o.rows) {
    mean += t.success(SuccessCriteria{}) ? 1.0 : 0.0;
    CHECK(t.lambda == doctest::Approx(default_lambda(20, 20)).epsilon(1e-15));
  }
  CHECK(o.cells[0].success_rate == doctest::Approx(mean / 5.0));

  const std::string csv = slurp(fs::path(j["out"].get<std::string>()) / "results.csv");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line == kCsvHeader);
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 5);

  const Json summary =
      Json::parse(slurp(fs::path(j["out"].get<std::string>()) / "summary.json"));
  CHECK(summary.at("version") == kVersion);
  CHECK(summary.at("seed") == 3);
  CHECK(summary.at("cells").size() == 1);
}

TEST_CASE("interrupted sweeps resume to the same file") {
  Json j = small_config();
  j["generator"]["noise"] = {{"kind", "missing"}, {"missing", 0}};
  j["axes"] = {{"m", {2, 6}}};
  j["trials"] = 3;
  const fs::path full = scratch("full");
  const fs::path part = scratch("part");
  j["out"] = full.string();
  run_sweep(config_from_json(j));
  const std::string reference = slurp(full / "results.csv");

  j["out"] = part.string();
  const ExperimentConfig c = config_from_json(j);
  SweepOptions stop;
  stop.max_new_trials = 2;
  const SweepOutcome first = run_sweep(c, stop);
  CHECK(!first.complete);
  CHECK(first.computed == 2);
  {
    std::ofstream app(part / "results.csv", std::ios::app);
    app << "1,2,123,20";  // torn write
  }
  const SweepOutcome second = run_sweep(c);
  CHECK(second.complete);
  CHECK(second.reused == 2);
  CHECK(second.computed == 4);
  CHECK(slurp(part / "results.csv") == reference);

  const SweepOutcome third = run_sweep(c);
  CHECK(third.computed == 0);
  CHECK(slurp(part / "results.csv") == reference);
}

TEST_CASE("a different seed is not reused") {
  Json j = small_config();
  j["trials"] = 2;
  j["out"] = scratch("reseed").string();
  run_sweep(config_from_json(j));
  j["seed"] = 4;
  const SweepOutcome o = run_sweep(config_from_json(j));
  CHECK(o.reused == 0);
  CHECK(o.computed == 2);
}

TEST_CASE("unusable output path fails before computing") {
  const fs::path blocker = scratch("blocker");
  { std::ofstream(blocker) << "x"; }
  Json j = small_config();
  j["out"] = (blocker / "sub").string();
  CHECK_THROWS(run_sweep(config_from_json(j)));
}

TEST_CASE("m bisection on a tiny problem") {
  Json j = Json::parse(R"({
    "generator": {"n": 20, "dims": [2, 2], "kappas": 5, "noise": {"kind": "missing", "missing": 0}},
    "lambda": "auto",
    "bisect_m": {"enabled": true, "trials": 4, "target": 0.75},
    "seed": 2
  })");
  j["out"] = scratch("bisect").string();
  const SweepOutcome o = run_sweep(config_from_json(j));
  REQUIRE(o.bisections.size() == 1);
  const BisectionResult& b = o.bisections[0];
  CHECK(b.d == 2);
  CHECK(b.m_star >= -1);
  CHECK(b.m_star <= 19);
  for (const Probe& p : b.probes) {
    if (p.m <= b.m_star) continue;
    if (p.m == b.m_star + 1) CHECK(p.success_rate < 0.75);
  }
  bool found_star = b.m_star < 0;
  for (const Probe& p : b.probes)
    if (p.m == b.m_star) {
      found_star = true;
      CHECK(p.success_rate >= 0.75);
    }
  CHECK(found_star);
}
