#pragma once

#include "lsssc/types.hpp"

#include <string>
#include <vector>

namespace lsssc {

using ValidationReport = std::vector<std::string>;

/// Lists every violated invariant of the pair (X, truth); an empty report
/// means the dataset is valid. Throws DimensionMismatch when the label count
/// disagrees with the number of columns.
ValidationReport validate_dataset(const DataMatrix& X, const SubspaceEnsemble& truth);

}  // namespace lsssc
