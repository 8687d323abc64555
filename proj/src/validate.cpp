#include "lsssc/validate.hpp"

#include "lsssc/errors.hpp"
#include "lsssc/tolerances.hpp"

#include <cmath>
#include <string>

namespace lsssc {

ValidationReport validate_dataset(const DataMatrix& X, const SubspaceEnsemble& truth) {
  if (truth.num_samples() != X.cols()) {
    throw DimensionMismatch("labels have length " + std::to_string(truth.num_samples()) +
                            " but X is " + std::to_string(X.rows()) + "x" +
                            std::to_string(X.cols()));
  }
  ValidationReport report;
  const Matrix& v = X.values();
  for (Index j = 0; j < v.cols(); ++j) {
    for (Index i = 0; i < v.rows(); ++i) {
      if (!std::isfinite(v(i, j))) {
        report.push_back("non-finite entry at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  if (truth.ambient_dim() != X.rows()) {
    report.push_back("bases have " + std::to_string(truth.ambient_dim()) +
                     " rows but X has " + std::to_string(X.rows()));
    return report;
  }
  for (int k = 0; k < truth.num_subspaces(); ++k) {
    const Matrix& U = truth.basis(k);
    const double err =
        (U.transpose() * U - Matrix::Identity(U.cols(), U.cols())).cwiseAbs().maxCoeff();
    if (!(err <= tol::kOrtho)) {
      report.push_back("basis " + std::to_string(k + 1) + " not orthonormal (max |U^T U - I| = " +
                       std::to_string(err) + ")");
    }
  }
  if (X.role() == Role::Clean) {
    for (Index j = 0; j < v.cols(); ++j) {
      const Vector y = v.col(j);
      if (!y.allFinite()) continue;
      const double norm = y.norm();
      if (!(std::abs(norm - 1.0) <= tol::kUnit)) {
        report.push_back("clean column " + std::to_string(j) + " has norm " + std::to_string(norm));
      }
      const Matrix& U = truth.basis(truth.labels()[j] - 1);
      const double off = (y - U * (U.transpose() * y)).norm();
      if (!(off <= 1e3 * tol::kUnit)) {
        report.push_back("clean column " + std::to_string(j) + " lies " + std::to_string(off) +
                         " away from its subspace");
      }
    }
  }
  return report;
}

}  // namespace lsssc
