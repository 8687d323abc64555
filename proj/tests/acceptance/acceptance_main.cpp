#include "lsssc/certificates.hpp"
#include "lsssc/clustering.hpp"
#include "lsssc/errors.hpp"
#include "lsssc/experiments.hpp"
#include "lsssc/generator.hpp"
#include "lsssc/geometry.hpp"
#include "lsssc/rng.hpp"
#include "lsssc/solver.hpp"
#include "lsssc/tolerances.hpp"

#include "oracles/direction_sweep.hpp"
#include "oracles/lasso_enum.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace lsssc;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Matrix gaussian(Engine& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

Matrix unit_columns(Matrix m) {
  for (Index j = 0; j < m.cols(); ++j) m.col(j).normalize();
  return m;
}

int uniform_int(Engine& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

struct Instance {
  Vector x;
  Matrix A;
  double lambda;
};

// Random column problem with n <= 12 and N <= 8 (so A has at most 7 columns).
Instance random_instance(std::uint64_t index) {
  Engine rng = make_stream(kSeed, Stream::Trial, index);
  const int n = uniform_int(rng, 3, 12);
  const int N = uniform_int(rng, 3, 8);
  const double lambdas[] = {0.5, 2.0, 10.0};
  Instance inst;
  inst.A = unit_columns(gaussian(rng, n, N - 1));
  inst.x = gaussian(rng, n, 1).col(0).normalized();
  inst.lambda = lambdas[index % 3];
  return inst;
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_obj = 0.0;
  double worst_feas = 0.0;
  double worst_slack = 0.0;
  double worst_dual = 0.0;
  double worst_sign = 0.0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    const Instance in = random_instance(k);
    const ColumnSolution s = solve_column(in.x, in.A, in.lambda);
    const oracle::LassoOptimum o = oracle::lasso_by_sign_enumeration(in.x, in.A, in.lambda);
    worst_obj = std::max(worst_obj, std::abs(s.objective - o.objective));
    worst_feas = std::max(worst_feas, (s.e - (in.x - in.A * s.c)).norm());
    worst_slack = std::max(worst_slack, (s.nu - in.lambda * s.e).norm());
    const Vector g = in.A.transpose() * s.nu;
    worst_dual = std::max(worst_dual, g.cwiseAbs().maxCoeff() - 1.0);
    for (Index j : s.support)
      worst_sign = std::max(worst_sign, std::abs(g(j) - (s.c(j) > 0 ? 1.0 : -1.0)));
  }
  const double secs = seconds_since(t0);
  const bool pass = worst_obj <= 1e-8 && worst_feas <= tol::kFeas && worst_slack <= tol::kFeas &&
                    worst_dual <= tol::kDual && worst_sign <= tol::kDual && secs <= 60.0;
  return {pass, fmt("50 instances, max |obj - oracle| %.2e, feas %.2e, nu-lambda e %.2e, "
                    "dual excess %.2e, sign %.2e, %.1f s",
                    worst_obj, worst_feas, worst_slack, worst_dual, worst_sign, secs)};
}

Outcome criterion2() {
  double worst = 0.0;
  int failures = 0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const Instance in = random_instance(1000 + k);
    SolverOptions a;
    a.polish = false;
    SolverOptions b = a;
    b.init_seed = derive_seed(kSeed, 2, k);
    try {
      const ColumnSolution sa = solve_column(in.x, in.A, in.lambda, a);
      const ColumnSolution sb = solve_column(in.x, in.A, in.lambda, b);
      worst = std::max(worst, (sa.nu - sb.nu).norm());
    } catch (const NonConvergence&) {
      ++failures;
    }
  }
  return {failures == 0 && worst <= 1e-6,
          fmt("20 instances, zero vs random start, max ||nu_a - nu_b|| %.2e, %d non-converged",
              worst, failures)};
}

Outcome criterion3() {
  double worst_sweep = 0.0;
  double worst_polar = 0.0;
  double worst_cross = 0.0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    Engine rng = make_stream(kSeed, Stream::Inradius, k);
    const int d = k < 10 ? 2 : 3;
    const int n = uniform_int(rng, d + 1, 8);
    const int count = uniform_int(rng, d + 1, 8);
    const Matrix S =
        gaussian(rng, n, d).householderQr().householderQ() * Matrix::Identity(n, d);
    const Matrix coords = unit_columns(gaussian(rng, d, count));
    const SymmetricPolytope P(S * coords, S);
    const double exact = restricted_inradius(P, S, InradiusMode::Exact).value;
    const double sweep =
        d == 2 ? oracle::inradius_sweep_2d(coords) : oracle::inradius_sweep_3d(coords);
    worst_sweep = std::max(worst_sweep, std::abs(exact - sweep));
    worst_polar = std::max(worst_polar, polar_duality_check(P, S));
  }
  for (int d = 1; d <= 4; ++d) {
    const Matrix I = Matrix::Identity(d, d);
    const double r = restricted_inradius(SymmetricPolytope(I, I), I, InradiusMode::Exact).value;
    worst_cross = std::max(worst_cross, std::abs(r - 1.0 / std::sqrt(d)));
  }
  return {worst_sweep <= 1e-4 && worst_polar <= 1e-8 && worst_cross <= 1e-10,
          fmt("20 carriers, max |exact - sweep| %.2e, max polar residual %.2e, "
              "cross-polytope error %.2e",
              worst_sweep, worst_polar, worst_cross)};
}

struct SoundnessStats {
  int qualifying = 0;
  int counterexamples = 0;
  int nu_checked = 0;
  int nu_violations = 0;
  double nu_worst_ratio = 0.0;
  double seconds = 0.0;
};

// Shared by the deterministic-criterion and dual-norm checks.
SoundnessStats soundness_run() {
  const auto t0 = std::chrono::steady_clock::now();
  SoundnessStats st;
  for (std::uint64_t k = 0; k < 200; ++k) {
    Engine rng = make_stream(kSeed, Stream::Trial, 5000 + k);
    GeneratorConfig g;
    g.ambient_dim = uniform_int(rng, 15, 30);
    const int L = uniform_int(rng, 2, 3);
    const int d = uniform_int(rng, 1, 3);
    const double kappa = uniform_int(rng, 3, 6);
    g.dims.assign(L, d);
    g.kappas.assign(L, kappa);
    g.noise.kind = NoiseKind::Ball;
    g.noise.delta = k % 10 == 0 ? 0.0 : std::uniform_real_distribution<double>(0.0, 0.06)(rng);
    g.seed = derive_seed(kSeed, 4, k);
    const Dataset data = generate_dataset(g);
    double delta = 0.0;
    for (Index i = 0; i < data.Z.cols(); ++i) delta = std::max(delta, data.Z.col(i).norm());

    const RadiiResult radii = compute_r(data.Y, data.truth, InradiusMode::Exact);
    const double lambda0 = default_lambda(g.ambient_dim, g.total_points());
    const IncoherenceResult mu0 = compute_incoherence(data.X, data.Y, data.truth, lambda0);
    const CriterionReport c0 = deterministic_criterion(radii.r, mu0.mu, delta);
    const double lambda = c0.verdict ? 0.5 * (*c0.lambda_lo + *c0.lambda_hi) : lambda0;
    const IncoherenceResult mu = compute_incoherence(data.X, data.Y, data.truth, lambda);
    const CriterionReport crit = deterministic_criterion(radii.r, mu.mu, delta);
    if (crit.verdict && crit.lambda_in_interval(lambda)) {
      ++st.qualifying;
      const LssscSolution sol = solve_lsssc(data.X, lambda);
      const bool det = check_subspace_detection(sol.C, data.truth.labels(), 1e-6).holds;
      const bool nontrivial = check_nontrivial(sol.C, 1e-6).holds;
      if (!det || !nontrivial) ++st.counterexamples;
    }
    if (delta > 0.0 && delta < radii.r) {
      for (std::size_t i = 0; i < radii.per_column.size(); ++i) {
        const double ri = radii.per_column[i];
        const double nu = mu.nu_norm[i];
        if (std::isnan(nu)) continue;
        const double bound = (1.0 + lambda * delta * (1.0 + ri)) / (ri - delta);
        ++st.nu_checked;
        st.nu_worst_ratio = std::max(st.nu_worst_ratio, nu / bound);
        if (nu > bound) ++st.nu_violations;
      }
    }
  }
  st.seconds = seconds_since(t0);
  return st;
}

Outcome criterion4(const SoundnessStats& st) {
  return {st.counterexamples == 0 && st.qualifying > 0 && st.seconds <= 300.0,
          fmt("200 instances, %d inside the criterion, %d counterexamples, %.1f s",
              st.qualifying, st.counterexamples, st.seconds)};
}

Outcome criterion5(const SoundnessStats& st) {
  return {st.nu_violations == 0 && st.nu_checked > 0,
          fmt("%d columns with 0 < delta < r, %d violations, max ||nu||/bound %.3f",
              st.nu_checked, st.nu_violations, st.nu_worst_ratio)};
}

fs::path config_path(const char* name) { return fs::path(LSSSC_SOURCE_DIR) / "configs" / name; }

Outcome criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig config = load_config(config_path("noiseless.json"));
  const std::vector<Cell> cells = expand_cells(config);
  const Cell& cell = cells.front();
  int ok = 0;
  int lhat_ok = 0;
  for (int t = 0; t < 20; ++t) {
    const TrialResult r = run_trial(cell, t, derive_seed(config.seed, cell.cell_id, t));
    lhat_ok += r.L_hat == 3;
    if (r.failure.empty() && r.detection && r.nontrivial && r.L_hat == 3 &&
        r.clustering_error == 0.0)
      ++ok;
  }
  const double secs = seconds_since(t0);
  return {ok >= 19 && secs <= 120.0,
          fmt("n=%d L=%d d=%d kappa=%g lambda=%.4f: %d/20 full recoveries (L_hat=3 in %d), %.1f s",
              cell.n(), cell.L(), cell.d(), cell.kappa(), cell.lambda, ok, lhat_ok, secs)};
}

Outcome criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig config = load_config(config_path("missing_mstar.json"));
  config.out = fs::temp_directory_path() / "lsssc_acceptance_mstar";
  fs::remove_all(config.out);
  const SweepOutcome o = run_sweep(config);
  const double secs = seconds_since(t0);
  int m2 = -1, m4 = -1, m8 = -1;
  int violations = 0;
  for (const BisectionResult& b : o.bisections) {
    if (b.d == 2) m2 = b.m_star;
    if (b.d == 4) m4 = b.m_star;
    if (b.d == 8) m8 = b.m_star;
    violations += static_cast<int>(b.monotonicity_violations.size());
  }
  const double r24 = m4 > 0 ? static_cast<double>(m2) / m4 : INFINITY;
  const double r28 = m8 > 0 ? static_cast<double>(m2) / m8 : INFINITY;
  const bool pass = r24 >= 1.4 && r24 <= 3.0 && r28 >= 2.5 && r28 <= 7.0 && secs <= 1200.0;
  return {pass, fmt("m*(2)=%d m*(4)=%d m*(8)=%d, ratios %.3f (need 1.4-3.0) and %.3f "
                    "(need 2.5-7.0), %d monotonicity violations, %.1f s",
                    m2, m4, m8, r24, r28, violations, secs)};
}

Outcome criterion8() {
  const int n = 100;
  const int m = 25;
  const PointSample s = sample_points({Matrix::Identity(n, n)}, {10.0}, derive_seed(kSeed, 8, 0));
  const Index count = s.Y.cols();
  const double eps = 0.5;
  const double threshold = projection_tail_threshold(n, m, eps);
  const double bound = projection_tail_bound(m, eps);
  int above = 0;
  double sum = 0.0;
  double sumsq = 0.0;
  for (Index i = 0; i < count; ++i) {
    const double sq = s.Y.values().col(i).head(m).squaredNorm();
    above += std::sqrt(sq) >= threshold;
    sum += sq;
    sumsq += sq * sq;
  }
  const double frac = static_cast<double>(above) / count;
  const double mean = sum / count;
  const double se = std::sqrt((sumsq / count - mean * mean) / (count - 1));
  const bool pass = count == 1000 && frac <= bound && frac <= 0.05 &&
                    std::abs(mean - 0.25) <= 3.0 * se;
  return {pass, fmt("%ld samples, fraction above %.3f is %.3f (bound %.3f), mean ||proj||^2 "
                    "%.4f, %.2f standard errors from 0.25",
                    static_cast<long>(count), threshold, frac, bound, mean,
                    std::abs(mean - 0.25) / se)};
}

Outcome criterion9() {
  Engine rng = make_stream(kSeed, Stream::Trial, 9);
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  int correct = 0;
  std::string got;
  for (int t = 0; t < 20; ++t) {
    const int L = uniform_int(rng, 2, 6);
    std::vector<int> sizes;
    int N = 0;
    for (int k = 0; k < L; ++k) {
      sizes.push_back(uniform_int(rng, 3, 10));
      N += sizes.back();
    }
    Matrix W = Matrix::Zero(N, N);
    int start = 0;
    for (int s : sizes) {
      for (int a = start; a < start + s; ++a)
        for (int b = a + 1; b < start + s; ++b) W(a, b) = W(b, a) = weight(rng);
      start += s;
    }
    const int est = estimate_num_clusters(affinity_from_weights(W));
    correct += est == L;
    got += std::to_string(est) + (est == L ? "" : "(want " + std::to_string(L) + ")") + " ";
  }
  return {correct == 20, fmt("%d/20 correct: %s", correct, got.c_str())};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome criterion10() {
  const Json j = Json::parse(R"({
    "generator": {"n": 30, "dims": [2, 2], "kappas": 5, "noise": {"kind": "missing", "missing": 0}},
    "lambda": "auto",
    "axes": {"m": [0, 6, 12], "d": [2, 3]},
    "trials": 4,
    "seed": 77
  })");
  ExperimentConfig config = config_from_json(j);
  const fs::path base = fs::temp_directory_path() / "lsssc_acceptance_resume";
  fs::remove_all(base);

  config.out = base / "first";
  config.threads = 1;
  run_sweep(config);
  config.out = base / "second";
  config.threads = 4;
  run_sweep(config);

  config.out = base / "resumed";
  SweepOptions stop;
  stop.max_new_trials = 9;
  const SweepOutcome partial = run_sweep(config, stop);
  {
    std::ofstream torn(config.out / "results.csv", std::ios::app);
    torn << "3,1,88172645463325252,30,2";
  }
  const SweepOutcome resumed = run_sweep(config);

  const std::string a = slurp(base / "first" / "results.csv");
  const std::string b = slurp(base / "second" / "results.csv");
  const std::string c = slurp(base / "resumed" / "results.csv");
  const bool pass = !a.empty() && a == b && a == c && !partial.complete && resumed.complete &&
                    resumed.reused == 9;
  return {pass, fmt("repeat run identical: %s, resumed run identical: %s (%ld reused, %ld new)",
                    a == b ? "yes" : "no", a == c ? "yes" : "no", resumed.reused,
                    resumed.computed)};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&failed](int id, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("CRITERION %d %s: %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  };
  report(1, criterion1);
  report(2, criterion2);
  report(3, criterion3);
  SoundnessStats st;
  bool soundness_ok = true;
  std::string soundness_error;
  try {
    st = soundness_run();
  } catch (const std::exception& e) {
    soundness_ok = false;
    soundness_error = e.what();
  }
  report(4, [&] { return soundness_ok ? criterion4(st) : Outcome{false, soundness_error}; });
  report(5, [&] { return soundness_ok ? criterion5(st) : Outcome{false, soundness_error}; });
  report(6, criterion6);
  report(7, criterion7);
  report(8, criterion8);
  report(9, criterion9);
  report(10, criterion10);
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
