#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace lsssc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Which part of the decomposition X = Y + Z a matrix plays.
enum class Role { Observed, Clean, Noise };

std::string to_string(Role role);
Role role_from_string(const std::string& name);

/// Dense n x N matrix whose columns are samples. Immutable once built.
class DataMatrix {
 public:
  /// Throws InvalidParameter unless rows >= 1 and cols >= 2.
  DataMatrix(Matrix values, Role role);

  const Matrix& values() const noexcept { return values_; }
  Role role() const noexcept { return role_; }
  Index rows() const noexcept { return values_.rows(); }
  Index cols() const noexcept { return values_.cols(); }
  auto col(Index i) const { return values_.col(i); }

 private:
  Matrix values_;
  Role role_;
};

/// Ground truth for a union of L subspaces: one orthonormal basis per
/// subspace and a 1-based label per sample.
class SubspaceEnsemble {
 public:
  /// Labels must lie in [1, bases.size()] and every basis needs the same
  /// number of rows and at least one column. Every subspace must own at
  /// least one sample.
  SubspaceEnsemble(std::vector<Matrix> bases, std::vector<int> labels);

  int num_subspaces() const noexcept { return static_cast<int>(bases_.size()); }
  Index ambient_dim() const noexcept { return bases_.front().rows(); }
  Index num_samples() const noexcept { return static_cast<Index>(labels_.size()); }

  /// k is 0-based here; labels() stays 1-based.
  const Matrix& basis(int k) const { return bases_.at(k); }
  const std::vector<Matrix>& bases() const noexcept { return bases_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  Index dim(int k) const { return bases_.at(k).cols(); }
  Index count(int k) const { return static_cast<Index>(members_.at(k).size()); }
  double kappa(int k) const { return static_cast<double>(count(k)) / static_cast<double>(dim(k)); }
  /// Column indices (0-based) of samples drawn from subspace k.
  const std::vector<Index>& members(int k) const { return members_.at(k); }

 private:
  std::vector<Matrix> bases_;
  std::vector<int> labels_;
  std::vector<std::vector<Index>> members_;
};

/// Observation pattern: true where an entry is observed.
class MaskMatrix {
 public:
  using Pattern = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

  explicit MaskMatrix(Pattern observed);

  const Pattern& observed() const noexcept { return observed_; }
  bool is_observed(Index row, Index col) const { return observed_(row, col); }
  Index rows() const noexcept { return observed_.rows(); }
  Index cols() const noexcept { return observed_.cols(); }
  Index missing_in_column(Index col) const;
  Matrix as_matrix() const { return observed_.cast<double>().matrix(); }

 private:
  Pattern observed_;
};

/// Primal/dual triple for one column problem
///   min ||c||_1 + (lambda/2)||e||^2  s.t.  e = x - A c
/// with nu = lambda e.
struct ColumnSolution {
  Vector c;
  Vector e;
  Vector nu;
  std::vector<Index> support;
  double objective = 0.0;
  double lambda = 0.0;
  int iterations = 0;
  /// Set when x = 0, so no dual direction exists.
  bool degenerate_dual = false;
  /// Set when the returned point came from the exact support/sign solve.
  bool polished = false;
  /// Incumbent objective at each convergence checkpoint.
  std::vector<double> objective_trace;
};

struct GeometrySummary {
  std::vector<double> r_ell;
  double r = 0.0;
  std::vector<double> mu_ell;
  double mu = 0.0;
  double delta = 0.0;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  bool criterion_holds = false;
};

}  // namespace lsssc
