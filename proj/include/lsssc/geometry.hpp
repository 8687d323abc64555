#pragma once

#include "lsssc/solver.hpp"
#include "lsssc/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace lsssc {

/// conv(+-p_1, ..., +-p_k) for generators p_j, optionally tied to a carrier
/// subspace that must contain every generator.
class SymmetricPolytope {
 public:
  explicit SymmetricPolytope(Matrix generators, std::optional<Matrix> carrier = std::nullopt);

  const Matrix& generators() const noexcept { return generators_; }
  const std::optional<Matrix>& carrier() const noexcept { return carrier_; }

 private:
  Matrix generators_;
  std::optional<Matrix> carrier_;
};

enum class InradiusMode {
  /// Polar vertex enumeration; carrier dimension at most 4.
  Exact,
  /// Multi-start projected subgradient on u -> max_i |<p_i, u>|.
  Randomized,
  /// Exact up to dimension 4, randomized above.
  Auto,
};

inline constexpr int kMaxExactDim = 4;

struct InradiusResult {
  /// Exact value, or an upper bound in randomized mode.
  double value = 0.0;
  bool exact = false;
  /// Generators do not span the carrier, so the inradius is zero.
  bool degenerate = false;
  /// Certified lower bound sigma_min(G)/sqrt(k).
  double lower_bound = 0.0;
  /// (value - lower_bound) / value.
  double gap = 0.0;
};

/// Radius of the largest disk of the carrier S (orthonormal columns)
/// inscribed in the polytope.
InradiusResult restricted_inradius(const SymmetricPolytope& polytope, const Matrix& carrier,
                                   InradiusMode mode = InradiusMode::Auto,
                                   std::uint64_t seed = 0);

/// Circumradius of {v : |<g_j, v>| <= 1} for the columns g_j of coords,
/// which must span R^d (d = coords.rows() <= 4). Vertex enumeration.
double polar_circumradius(const Matrix& coords);

/// Inradius of conv(+-g_j) as the smallest distance from the origin to a
/// supporting facet hyperplane, computed from the primal point set.
double inradius_by_facets(const Matrix& coords);

/// min over unit u of max_j |<g_j, u>| by projected subgradient descent.
double inradius_randomized(const Matrix& coords, std::uint64_t seed, int restarts = 0,
                           int steps = 500);

/// |r_S(T) R_S(T polar cap S) - 1|.
double polar_duality_check(const SymmetricPolytope& polytope, const Matrix& carrier);

/// r(Q) - delta when r(Q) > delta, else nullopt (bound inapplicable).
std::optional<double> perturbation_inradius_bound(double q_inradius, double delta);

struct RadiiResult {
  /// Leave-one-out restricted inradius of each column, in column order.
  std::vector<double> per_column;
  std::vector<double> r_ell;
  double r = 0.0;
  std::vector<bool> degenerate;
  bool any_degenerate = false;
  bool exact = true;
};

/// r_l = min_i r_{S_l}(SC(Y^(l)_{-i})) and r = min_l r_l. OpenMP over columns.
RadiiResult compute_r(const DataMatrix& Y, const SubspaceEnsemble& truth,
                      InradiusMode mode = InradiusMode::Auto);
/// Serial reference for compute_r.
RadiiResult compute_r_serial(const DataMatrix& Y, const SubspaceEnsemble& truth,
                             InradiusMode mode = InradiusMode::Auto);

struct IncoherenceResult {
  std::vector<double> mu_ell;
  double mu = 0.0;
  /// Set when L = 1: there are no foreign points.
  bool undefined = false;
  /// Columns whose same-subspace dual vanished.
  int skipped = 0;
  /// Per column: ||nu||, ||proj_S nu||, ||nu - proj_S nu|| of the
  /// same-subspace problem P(x_i, X^(l)_{-i}, lambda). NaN when skipped.
  std::vector<double> nu_norm;
  std::vector<double> nu_parallel;
  std::vector<double> nu_perp;
};

/// mu_l = max over foreign clean points y and members i of |<v_i^(l), y>|,
/// with v_i^(l) the dual direction of P(x_i, X^(l)_{-i}, lambda).
IncoherenceResult compute_incoherence(const DataMatrix& X, const DataMatrix& Y,
                                      const SubspaceEnsemble& truth, double lambda,
                                      const SolverOptions& opts = {});

}  // namespace lsssc
