#include "lsssc/types.hpp"

#include "lsssc/errors.hpp"

#include <utility>

namespace lsssc {

std::string to_string(Role role) {
  switch (role) {
    case Role::Observed: return "observed";
    case Role::Clean: return "clean";
    case Role::Noise: return "noise";
  }
  return "observed";
}

Role role_from_string(const std::string& name) {
  if (name == "observed") return Role::Observed;
  if (name == "clean") return Role::Clean;
  if (name == "noise") return Role::Noise;
  throw InvalidParameter("unknown matrix role '" + name + "'");
}

DataMatrix::DataMatrix(Matrix values, Role role) : values_(std::move(values)), role_(role) {
  if (values_.rows() < 1 || values_.cols() < 2) {
    throw InvalidParameter("data matrix must be at least 1x2, got " +
                           std::to_string(values_.rows()) + "x" +
                           std::to_string(values_.cols()));
  }
}

SubspaceEnsemble::SubspaceEnsemble(std::vector<Matrix> bases, std::vector<int> labels)
    : bases_(std::move(bases)), labels_(std::move(labels)) {
  if (bases_.empty()) throw InvalidParameter("subspace ensemble needs at least one basis");
  const Index n = bases_.front().rows();
  for (std::size_t k = 0; k < bases_.size(); ++k) {
    if (bases_[k].rows() != n) {
      throw DimensionMismatch("basis " + std::to_string(k + 1) + " has " +
                              std::to_string(bases_[k].rows()) + " rows, expected " +
                              std::to_string(n));
    }
    if (bases_[k].cols() < 1) {
      throw InvalidParameter("basis " + std::to_string(k + 1) + " has no columns");
    }
  }
  members_.assign(bases_.size(), {});
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const int l = labels_[i];
    if (l < 1 || l > static_cast<int>(bases_.size())) {
      throw InvalidParameter("label " + std::to_string(l) + " at column " + std::to_string(i) +
                             " outside [1, " + std::to_string(bases_.size()) + "]");
    }
    members_[l - 1].push_back(static_cast<Index>(i));
  }
  for (std::size_t k = 0; k < members_.size(); ++k) {
    if (members_[k].empty()) {
      throw InvalidParameter("subspace " + std::to_string(k + 1) + " has no samples");
    }
  }
}

MaskMatrix::MaskMatrix(Pattern observed) : observed_(std::move(observed)) {}

Index MaskMatrix::missing_in_column(Index col) const {
  return observed_.rows() - observed_.col(col).count();
}

}  // namespace lsssc
