#pragma once

#include "lsssc/solver.hpp"
#include "lsssc/types.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lsssc {

/// Outcome of evaluating one closed-form recovery criterion.
struct CriterionReport {
  std::string name;
  bool hypotheses_hold = false;
  std::map<std::string, double> inputs;
  std::optional<double> lambda_lo;
  std::optional<double> lambda_hi;
  std::optional<double> bound;
  /// Raw value of a success-probability lower bound, possibly negative.
  std::optional<double> probability;
  bool verdict = false;
  /// Signed slack; non-negative exactly when verdict holds.
  double margin = 0.0;
  std::vector<bool> per_subspace;
  std::vector<double> per_subspace_value;

  bool lambda_in_interval(double lambda) const;
};

/// The four optimality conditions for (c, e, nu) at P(x, A, lambda) that
/// force every optimum to vanish outside T.
struct OptimalityCheck {
  bool sign_match = false;         // ||A_S^T nu - sign(c_S)||_inf <= kDual
  bool nu_is_lambda_e = false;     // ||nu - lambda e|| <= kFeas (1 + ||nu||)
  bool same_subspace_bound = false;  // ||A_{T\S}^T nu||_inf <= 1 + kDual
  bool foreign_strict = false;     // ||A_{T^c}^T nu||_inf < 1 - kDual
  double sign_residual = 0.0;
  double nu_residual = 0.0;
  double same_subspace_max = 0.0;
  double foreign_max = 0.0;
  /// 1 - foreign_max; condition 4 needs this to exceed kDual.
  double foreign_margin = 0.0;
  /// Condition 4 fails but foreign_max is within kDual of 1.
  bool near_boundary = false;
  bool all() const { return sign_match && nu_is_lambda_e && same_subspace_bound && foreign_strict; }
};

/// S and T index columns of A and S must be a subset of T (else
/// InvalidParameter). e must equal x - A c within kFeas.
OptimalityCheck check_optimality_certificate(const Matrix& A, const Vector& x, const Vector& c,
                                             const Vector& e, const Vector& nu, double lambda,
                                             const std::vector<Index>& S,
                                             const std::vector<Index>& T);

/// Candidate (c, e, nu) for P(x_i, X_{-i}, lambda) assembled from the
/// same-subspace solve, with c zero outside T.
struct DualCertificate {
  Index column = 0;
  Vector c;
  Vector e;
  Vector nu;
  std::vector<Index> S;
  std::vector<Index> T;
  OptimalityCheck check;
};

/// labels are 1-based, one per column of X.
DualCertificate construct_dual_certificate(const Matrix& X, const std::vector<int>& labels,
                                           Index i, double lambda, const SolverOptions& opts = {});

struct FalsePositive {
  Index i;  // column (the sample being represented)
  Index j;  // row (the sample used)
  double value;
};

struct DetectionReport {
  bool holds = true;
  std::vector<FalsePositive> false_positives;
};

/// No |C(j, i)| > tau with labels[i] != labels[j].
DetectionReport check_subspace_detection(const Matrix& C, const std::vector<int>& labels,
                                         double tau);

struct NontrivialReport {
  bool holds = true;
  std::vector<Index> zero_columns;
};

NontrivialReport check_nontrivial(const Matrix& C, double tau);

/// delta < (r - mu)/5 with lambda in (5/(2r + 3mu), 15/(2r + 8mu)).
CriterionReport deterministic_criterion(double r, double mu, double delta);

/// 2 lambda delta < (r_l - mu_l - 2 delta)/(mu_l + delta), per subspace.
/// Holds vacuously when mu_l + delta = 0 and r_l > 0.
CriterionReport intermediate_detection_criterion(const std::vector<double>& r_ell,
                                                 const std::vector<double>& mu_ell, double delta,
                                                 double lambda);

/// 1/(r_l - 2 delta - delta^2), or nullopt when the denominator is not positive.
std::optional<double> nontriviality_lambda_lower(double r_ell, double delta);

using CKappa = std::function<double(double)>;
inline constexpr double kDefaultCKappa = 0.35355339059327373;  // 1/sqrt(8)
CKappa constant_c_kappa(double value = kDefaultCKappa);

inline constexpr double kC1 = 1.0 / 48.0;
inline constexpr double kC2 = 0.070710678118654752;  // 1/(10 sqrt 2)
inline constexpr double kC3 = kC2 * kC2 / 4.0;       // 1/800

/// Dimension and noise conditions of the random model, the lambda interval
/// (5/7, 10/3) sqrt(n/(6 log N)) and the success probability bound.
/// Throws InvalidParameter when some kappa <= 1.
CriterionReport random_model_criteria(int n, int N, const std::vector<int>& dims,
                                      const std::vector<double>& kappas, double delta,
                                      const CKappa& c_kappa = constant_c_kappa());

struct MissingDataReport {
  CriterionReport report;
  /// M_l = c3 c(kappa_l)^2 log(kappa_l) n / d_l.
  std::vector<double> cap;
  std::vector<long> cap_floor;
};

MissingDataReport missing_data_criteria(int n, int N, const std::vector<int>& dims,
                                        const std::vector<double>& kappas,
                                        const CKappa& c_kappa = constant_c_kappa());

/// sqrt(n/(6 log N)).
double random_model_lambda_scale(int n, int N);
/// Midpoint-style default 2 sqrt(n/(6 log N)).
double default_lambda(int n, int N);

struct NuNormBounds {
  double nu1 = 0.0;
  double nu2 = 0.0;
  double nu = 0.0;
};

/// Closed-form bounds on the in-subspace part, the orthogonal part and the
/// whole dual vector. Requires 0 <= delta < r; nullopt otherwise.
std::optional<NuNormBounds> nu_norm_diagnostics(double r, double delta, double lambda);

/// P(||proj_m u|| >= sqrt(m/n)/(1 - eps)) <= 2 exp(-eps^2 m / 4).
double projection_tail_bound(int m, double eps);
double projection_tail_threshold(int n, int m, double eps);
/// P(|<u, v>| >= eps) <= 2 exp(-n eps^2 / 2) for uniform unit u.
double spherical_cap_bound(int n, double eps);
/// c(kappa) sqrt(log kappa) / sqrt(2 d).
double inradius_lower_bound(double c_kappa, double kappa, int d);
/// sqrt(6 log N / n).
double incoherence_upper_bound(int n, int N);

}  // namespace lsssc
