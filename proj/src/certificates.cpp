#include "lsssc/certificates.hpp"

#include "lsssc/errors.hpp"
#include "lsssc/tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lsssc {

bool CriterionReport::lambda_in_interval(double lambda) const {
  return lambda_lo && lambda_hi && *lambda_lo < lambda && lambda < *lambda_hi;
}

namespace {

}  // namespace

OptimalityCheck check_optimality_certificate(const Matrix& A, const Vector& x, const Vector& c,
                                             const Vector& e, const Vector& nu, double lambda,
                                             const std::vector<Index>& S,
                                             const std::vector<Index>& T) {
  const Index k = A.cols();
  if (x.size() != A.rows() || e.size() != A.rows() || nu.size() != A.rows() || c.size() != k) {
    throw DimensionMismatch("certificate inputs disagree with A in shape");
  }
  std::vector<bool> in_T(static_cast<std::size_t>(k), false);
  std::vector<bool> in_S(static_cast<std::size_t>(k), false);
  for (Index t : T) {
    if (t < 0 || t >= k) throw InvalidParameter("T indexes outside A");
    in_T[t] = true;
  }
  for (Index s : S) {
    if (s < 0 || s >= k) throw InvalidParameter("S indexes outside A");
    if (!in_T[s]) throw InvalidParameter("support S is not contained in T");
    in_S[s] = true;
  }
  const double feas = (e - (x - A * c)).norm();
  if (feas > tol::kFeas * std::max(1.0, x.norm())) {
    throw InvalidParameter("e does not equal x - A c (residual " + std::to_string(feas) + ")");
  }

  OptimalityCheck out;
  const Vector corr = A.transpose() * nu;
  for (Index j = 0; j < k; ++j) {
    const double a = std::abs(corr(j));
    if (in_S[j]) {
      const double sign = c(j) > 0.0 ? 1.0 : (c(j) < 0.0 ? -1.0 : 0.0);
      out.sign_residual = std::max(out.sign_residual, std::abs(corr(j) - sign));
    } else if (in_T[j]) {
      out.same_subspace_max = std::max(out.same_subspace_max, a);
    } else {
      out.foreign_max = std::max(out.foreign_max, a);
    }
  }
  out.nu_residual = (nu - lambda * e).norm();
  out.sign_match = out.sign_residual <= tol::kDual;
  out.nu_is_lambda_e = out.nu_residual <= tol::kFeas * (1.0 + nu.norm());
  out.same_subspace_bound = out.same_subspace_max <= 1.0 + tol::kDual;
  out.foreign_margin = 1.0 - out.foreign_max;
  out.foreign_strict = out.foreign_max < 1.0 - tol::kDual;
  out.near_boundary = !out.foreign_strict && std::abs(out.foreign_margin) <= tol::kDual;
  return out;
}

DualCertificate construct_dual_certificate(const Matrix& X, const std::vector<int>& labels,
                                           Index i, double lambda, const SolverOptions& opts) {
  const Index N = X.cols();
  if (static_cast<Index>(labels.size()) != N) {
    throw DimensionMismatch("labels have length " + std::to_string(labels.size()) + " but X has " +
                            std::to_string(N) + " columns");
  }
  if (i < 0 || i >= N) throw InvalidParameter("column index out of range");
  DualCertificate out;
  out.column = i;
  // Column j of X_{-i} is column j (j < i) or j + 1 (j >= i) of X.
  std::vector<Index> own_cols;
  for (Index j = 0; j + 1 < N; ++j) {
    const Index src = j < i ? j : j + 1;
    if (labels[src] == labels[i]) {
      out.T.push_back(j);
      own_cols.push_back(src);
    }
  }
  if (out.T.empty()) throw InvalidParameter("column has no same-subspace neighbours");
  const Matrix own = X(Eigen::all, own_cols);
  const Vector x = X.col(i);
  const ColumnSolution sol = solve_column(x, own, lambda, opts);
  out.c = Vector::Zero(N - 1);
  for (std::size_t t = 0; t < out.T.size(); ++t) out.c(out.T[t]) = sol.c(static_cast<Index>(t));
  for (Index s : sol.support) out.S.push_back(out.T[s]);
  const Matrix A = drop_column(X, i);
  out.e = x - A * out.c;
  out.nu = sol.nu;
  out.check = check_optimality_certificate(A, x, out.c, out.e, out.nu, lambda, out.S, out.T);
  return out;
}

DetectionReport check_subspace_detection(const Matrix& C, const std::vector<int>& labels,
                                         double tau) {
  const Index N = C.cols();
  if (C.rows() != N || static_cast<Index>(labels.size()) != N) {
    throw DimensionMismatch("C must be N x N with one label per column");
  }
  DetectionReport out;
  for (Index i = 0; i < N; ++i) {
    for (Index j = 0; j < N; ++j) {
      if (labels[i] == labels[j]) continue;
      if (std::abs(C(j, i)) > tau) out.false_positives.push_back(FalsePositive{i, j, C(j, i)});
    }
  }
  out.holds = out.false_positives.empty();
  return out;
}

NontrivialReport check_nontrivial(const Matrix& C, double tau) {
  NontrivialReport out;
  for (Index i = 0; i < C.cols(); ++i) {
    if (C.rows() == 0 || C.col(i).cwiseAbs().maxCoeff() <= tau) out.zero_columns.push_back(i);
  }
  out.holds = out.zero_columns.empty();
  return out;
}

CriterionReport deterministic_criterion(double r, double mu, double delta) {
  CriterionReport out;
  out.name = "deterministic";
  out.inputs = {{"r", r}, {"mu", mu}, {"delta", delta}};
  out.hypotheses_hold = r > 0.0 && mu >= 0.0 && delta >= 0.0;
  if (!out.hypotheses_hold) return out;
  out.bound = (r - mu) / 5.0;
  out.lambda_lo = 5.0 / (2.0 * r + 3.0 * mu);
  out.lambda_hi = 15.0 / (2.0 * r + 8.0 * mu);
  out.margin = *out.bound - delta;
  out.verdict = delta < *out.bound;
  return out;
}

CriterionReport intermediate_detection_criterion(const std::vector<double>& r_ell,
                                                 const std::vector<double>& mu_ell, double delta,
                                                 double lambda) {
  if (r_ell.size() != mu_ell.size()) {
    throw DimensionMismatch("r_ell and mu_ell must have one entry per subspace");
  }
  CriterionReport out;
  out.name = "intermediate_detection";
  out.inputs = {{"delta", delta}, {"lambda", lambda}};
  out.hypotheses_hold = delta >= 0.0 && lambda > 0.0;
  for (double r : r_ell) out.hypotheses_hold = out.hypotheses_hold && r > 0.0;
  if (!out.hypotheses_hold) return out;
  out.margin = std::numeric_limits<double>::infinity();
  bool all = true;
  for (std::size_t l = 0; l < r_ell.size(); ++l) {
    const double denom = mu_ell[l] + delta;
    double slack;
    if (denom == 0.0) {
      slack = std::numeric_limits<double>::infinity();
    } else {
      slack = (r_ell[l] - mu_ell[l] - 2.0 * delta) / denom - 2.0 * lambda * delta;
    }
    out.per_subspace.push_back(slack > 0.0);
    out.per_subspace_value.push_back(slack);
    all = all && slack > 0.0;
    out.margin = std::min(out.margin, slack);
  }
  out.verdict = all;
  return out;
}

std::optional<double> nontriviality_lambda_lower(double r_ell, double delta) {
  const double denom = r_ell - 2.0 * delta - delta * delta;
  if (!(denom > 0.0)) return std::nullopt;
  return 1.0 / denom;
}

CKappa constant_c_kappa(double value) {
  return [value](double) { return value; };
}

double random_model_lambda_scale(int n, int N) {
  if (n < 1 || N < 2) throw InvalidParameter("need n >= 1 and N >= 2");
  return std::sqrt(n / (6.0 * std::log(static_cast<double>(N))));
}

double default_lambda(int n, int N) { return 2.0 * random_model_lambda_scale(n, N); }

namespace {

void check_model(int n, int N, const std::vector<int>& dims, const std::vector<double>& kappas) {
  if (dims.empty() || dims.size() != kappas.size()) {
    throw InvalidParameter("need one kappa per subspace dimension");
  }
  if (n < 1 || N < 2) throw InvalidParameter("need n >= 1 and N >= 2");
  for (std::size_t l = 0; l < dims.size(); ++l) {
    if (dims[l] < 1) throw InvalidParameter("subspace dimensions must be positive");
    if (!(kappas[l] > 1.0)) throw InvalidParameter("kappa must exceed 1 so that log kappa > 0");
  }
}

double base_probability(int N, const std::vector<int>& dims, const std::vector<double>& kappas) {
  double p = 1.0 - 2.0 / N;
  for (std::size_t l = 0; l < dims.size(); ++l) {
    const double count = kappas[l] * dims[l];
    p -= count * std::exp(-std::sqrt(kappas[l]) * dims[l]);
  }
  return p;
}

// Per-subspace slack of d_l < c1 c(kappa)^2 log(kappa)/log(N) n.
std::vector<double> dimension_slack(int n, int N, const std::vector<int>& dims,
                                    const std::vector<double>& kappas, const CKappa& c_kappa) {
  std::vector<double> slack;
  for (std::size_t l = 0; l < dims.size(); ++l) {
    const double c = c_kappa(kappas[l]);
    slack.push_back(kC1 * c * c * std::log(kappas[l]) / std::log(static_cast<double>(N)) * n -
                    dims[l]);
  }
  return slack;
}

}  // namespace

CriterionReport random_model_criteria(int n, int N, const std::vector<int>& dims,
                                      const std::vector<double>& kappas, double delta,
                                      const CKappa& c_kappa) {
  check_model(n, N, dims, kappas);
  CriterionReport out;
  out.name = "random_model";
  out.inputs = {{"n", n}, {"N", N}, {"delta", delta}};
  out.hypotheses_hold = delta >= 0.0;
  const std::vector<double> dslack = dimension_slack(n, N, dims, kappas, c_kappa);
  out.margin = std::numeric_limits<double>::infinity();
  double delta_bound = std::numeric_limits<double>::infinity();
  bool all = true;
  for (std::size_t l = 0; l < dims.size(); ++l) {
    const double c = c_kappa(kappas[l]);
    const double bound = kC2 * c * std::sqrt(std::log(kappas[l]) / dims[l]);
    delta_bound = std::min(delta_bound, bound);
    const bool ok = dslack[l] > 0.0 && delta < bound;
    out.per_subspace.push_back(ok);
    out.per_subspace_value.push_back(bound);
    out.inputs["d_" + std::to_string(l + 1)] = dims[l];
    out.inputs["kappa_" + std::to_string(l + 1)] = kappas[l];
    out.inputs["d_slack_" + std::to_string(l + 1)] = dslack[l];
    all = all && ok;
    out.margin = std::min({out.margin, bound - delta, dslack[l]});
  }
  out.bound = delta_bound;
  const double scale = random_model_lambda_scale(n, N);
  out.lambda_lo = 5.0 / 7.0 * scale;
  out.lambda_hi = 10.0 / 3.0 * scale;
  out.probability = base_probability(N, dims, kappas);
  out.verdict = out.hypotheses_hold && all;
  return out;
}

MissingDataReport missing_data_criteria(int n, int N, const std::vector<int>& dims,
                                        const std::vector<double>& kappas,
                                        const CKappa& c_kappa) {
  check_model(n, N, dims, kappas);
  MissingDataReport out;
  CriterionReport& rep = out.report;
  rep.name = "missing_data";
  rep.inputs = {{"n", n}, {"N", N}};
  rep.hypotheses_hold = true;
  const std::vector<double> dslack = dimension_slack(n, N, dims, kappas, c_kappa);
  double p = base_probability(N, dims, kappas);
  rep.margin = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < dims.size(); ++l) {
    const double c = c_kappa(kappas[l]);
    const double cap = kC3 * c * c * std::log(kappas[l]) * n / dims[l];
    out.cap.push_back(cap);
    out.cap_floor.push_back(static_cast<long>(std::floor(cap)));
    p -= 2.0 * kappas[l] * dims[l] * std::exp(-cap / 16.0);
    rep.per_subspace.push_back(dslack[l] > 0.0);
    rep.per_subspace_value.push_back(cap);
    rep.margin = std::min(rep.margin, dslack[l]);
  }
  rep.probability = p;
  rep.verdict = rep.margin > 0.0;
  return out;
}

std::optional<NuNormBounds> nu_norm_diagnostics(double r, double delta, double lambda) {
  if (!(delta >= 0.0) || !(delta < r) || !(lambda > 0.0)) return std::nullopt;
  NuNormBounds b;
  b.nu2 = lambda * delta * (1.0 / r + 1.0);
  b.nu1 = (1.0 + delta * b.nu2) / (r - delta);
  b.nu = (1.0 + lambda * delta * (1.0 + r)) / (r - delta);
  return b;
}

double projection_tail_bound(int m, double eps) {
  if (m < 1 || !(eps > 0.0 && eps < 1.0)) throw InvalidParameter("need m >= 1 and 0 < eps < 1");
  return 2.0 * std::exp(-eps * eps * m / 4.0);
}

double projection_tail_threshold(int n, int m, double eps) {
  if (n < 1 || m < 1 || m > n || !(eps > 0.0 && eps < 1.0)) {
    throw InvalidParameter("need 1 <= m <= n and 0 < eps < 1");
  }
  return std::sqrt(static_cast<double>(m) / n) / (1.0 - eps);
}

double spherical_cap_bound(int n, double eps) {
  if (n < 1 || !(eps > 0.0)) throw InvalidParameter("need n >= 1 and eps > 0");
  return 2.0 * std::exp(-n * eps * eps / 2.0);
}

double inradius_lower_bound(double c_kappa, double kappa, int d) {
  if (!(kappa > 1.0) || d < 1) throw InvalidParameter("need kappa > 1 and d >= 1");
  return c_kappa * std::sqrt(std::log(kappa)) / std::sqrt(2.0 * d);
}

double incoherence_upper_bound(int n, int N) {
  if (n < 1 || N < 2) throw InvalidParameter("need n >= 1 and N >= 2");
  return std::sqrt(6.0 * std::log(static_cast<double>(N)) / n);
}

}  // namespace lsssc
