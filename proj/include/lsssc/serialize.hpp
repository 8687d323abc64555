#pragma once

#include "lsssc/certificates.hpp"
#include "lsssc/generator.hpp"
#include "lsssc/types.hpp"

#include <json.hpp>

namespace lsssc {

using Json = nlohmann::json;

/// Matrices are stored column-major as {"rows", "cols", "data"}.
Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
Json to_json(const Vector& v);
Vector vector_from_json(const Json& j);

Json to_json(const DataMatrix& m);
DataMatrix data_matrix_from_json(const Json& j);

Json to_json(const SubspaceEnsemble& s);
SubspaceEnsemble ensemble_from_json(const Json& j);

Json to_json(const MaskMatrix& m);
MaskMatrix mask_from_json(const Json& j);

Json to_json(const ColumnSolution& s);
ColumnSolution column_solution_from_json(const Json& j);

Json to_json(const GeometrySummary& g);
GeometrySummary geometry_summary_from_json(const Json& j);

Json to_json(const NoiseSpec& n);
NoiseSpec noise_spec_from_json(const Json& j);

/// Field names: n, dims, kappas, noise, seed.
Json to_json(const GeneratorConfig& g);
GeneratorConfig generator_config_from_json(const Json& j);

Json to_json(const CriterionReport& r);
CriterionReport criterion_report_from_json(const Json& j);

}  // namespace lsssc
