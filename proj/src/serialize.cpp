#include "lsssc/serialize.hpp"

#include "lsssc/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace lsssc {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const Json::exception& ex) {
    throw ConfigError(std::string("bad field '") + key + "': " + ex.what());
  }
}

// JSON has no infinities; +-inf is written as the strings "inf" / "-inf".
Json number(double v) {
  if (std::isinf(v)) return v > 0 ? Json("inf") : Json("-inf");
  return Json(v);
}

double number_from(const Json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ConfigError("expected a number, got '" + s + "'");
  }
  return j.get<double>();
}

Json numbers(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

std::vector<double> numbers_from(const Json& j) {
  std::vector<double> out;
  for (const Json& x : j) out.push_back(number_from(x));
  return out;
}

Json optional_number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

std::optional<double> optional_from(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return number_from(j.at(key));
}

}  // namespace

Json to_json(const Matrix& m) {
  Json data = Json::array();
  for (Index c = 0; c < m.cols(); ++c)
    for (Index r = 0; r < m.rows(); ++r) data.push_back(m(r, c));
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Matrix matrix_from_json(const Json& j) {
  const auto rows = get<Index>(j, "rows");
  const auto cols = get<Index>(j, "cols");
  const Json& data = field(j, "data");
  if (rows < 0 || cols < 0 || !data.is_array() ||
      data.size() != static_cast<std::size_t>(rows * cols)) {
    throw ConfigError("matrix data does not match its shape");
  }
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = data[k++].get<double>();
  return m;
}

Json to_json(const Vector& v) {
  Json data = Json::array();
  for (Index i = 0; i < v.size(); ++i) data.push_back(v(i));
  return data;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw ConfigError("vector must be a JSON array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = j[i].get<double>();
  return v;
}

Json to_json(const DataMatrix& m) {
  return Json{{"role", to_string(m.role())}, {"values", to_json(m.values())}};
}

DataMatrix data_matrix_from_json(const Json& j) {
  return DataMatrix(matrix_from_json(field(j, "values")), role_from_string(get<std::string>(j, "role")));
}

Json to_json(const SubspaceEnsemble& s) {
  Json bases = Json::array();
  for (const Matrix& b : s.bases()) bases.push_back(to_json(b));
  return Json{{"bases", bases}, {"labels", s.labels()}};
}

SubspaceEnsemble ensemble_from_json(const Json& j) {
  std::vector<Matrix> bases;
  for (const Json& b : field(j, "bases")) bases.push_back(matrix_from_json(b));
  return SubspaceEnsemble(std::move(bases), get<std::vector<int>>(j, "labels"));
}

Json to_json(const MaskMatrix& m) {
  return Json{{"observed", to_json(Matrix(m.as_matrix()))}};
}

MaskMatrix mask_from_json(const Json& j) {
  const Matrix m = matrix_from_json(field(j, "observed"));
  return MaskMatrix(m.array() != 0.0);
}

Json to_json(const ColumnSolution& s) {
  return Json{{"c", to_json(s.c)},
              {"e", to_json(s.e)},
              {"nu", to_json(s.nu)},
              {"support", s.support},
              {"objective", s.objective},
              {"lambda", s.lambda},
              {"iterations", s.iterations},
              {"degenerate_dual", s.degenerate_dual},
              {"polished", s.polished},
              {"objective_trace", s.objective_trace}};
}

ColumnSolution column_solution_from_json(const Json& j) {
  ColumnSolution s;
  s.c = vector_from_json(field(j, "c"));
  s.e = vector_from_json(field(j, "e"));
  s.nu = vector_from_json(field(j, "nu"));
  s.support = get<std::vector<Index>>(j, "support");
  s.objective = get<double>(j, "objective");
  s.lambda = get<double>(j, "lambda");
  s.iterations = get<int>(j, "iterations");
  s.degenerate_dual = get<bool>(j, "degenerate_dual");
  s.polished = get<bool>(j, "polished");
  s.objective_trace = get<std::vector<double>>(j, "objective_trace");
  return s;
}

Json to_json(const GeometrySummary& g) {
  return Json{{"r_ell", g.r_ell},         {"r", g.r},
              {"mu_ell", g.mu_ell},       {"mu", g.mu},
              {"delta", g.delta},         {"lambda_lo", g.lambda_lo},
              {"lambda_hi", g.lambda_hi}, {"criterion_holds", g.criterion_holds}};
}

GeometrySummary geometry_summary_from_json(const Json& j) {
  GeometrySummary g;
  g.r_ell = get<std::vector<double>>(j, "r_ell");
  g.r = get<double>(j, "r");
  g.mu_ell = get<std::vector<double>>(j, "mu_ell");
  g.mu = get<double>(j, "mu");
  g.delta = get<double>(j, "delta");
  g.lambda_lo = get<double>(j, "lambda_lo");
  g.lambda_hi = get<double>(j, "lambda_hi");
  g.criterion_holds = get<bool>(j, "criterion_holds");
  return g;
}

Json to_json(const NoiseSpec& n) {
  Json j{{"kind", to_string(n.kind)}, {"delta", n.delta}, {"missing", n.missing}};
  if (n.kind == NoiseKind::Explicit) j["z"] = to_json(n.explicit_z);
  return j;
}

NoiseSpec noise_spec_from_json(const Json& j) {
  NoiseSpec n;
  try {
    n.kind = noise_kind_from_string(get<std::string>(j, "kind"));
  } catch (const InvalidParameter& ex) {
    throw ConfigError(ex.what());
  }
  if (j.contains("delta")) n.delta = get<double>(j, "delta");
  if (j.contains("missing")) {
    const Json& m = j.at("missing");
    n.missing = m.is_array() ? m.get<std::vector<int>>() : std::vector<int>{m.get<int>()};
  }
  if (j.contains("z")) n.explicit_z = matrix_from_json(j.at("z"));
  return n;
}

Json to_json(const GeneratorConfig& g) {
  return Json{{"n", g.ambient_dim},
              {"dims", g.dims},
              {"kappas", g.kappas},
              {"noise", to_json(g.noise)},
              {"seed", g.seed}};
}

GeneratorConfig generator_config_from_json(const Json& j) {
  GeneratorConfig g;
  g.ambient_dim = get<int>(j, "n");
  g.dims = get<std::vector<int>>(j, "dims");
  const Json& k = field(j, "kappas");
  g.kappas = k.is_array() ? k.get<std::vector<double>>()
                          : std::vector<double>(g.dims.size(), k.get<double>());
  if (j.contains("noise")) g.noise = noise_spec_from_json(j.at("noise"));
  if (j.contains("seed")) g.seed = get<std::uint64_t>(j, "seed");
  return g;
}

Json to_json(const CriterionReport& r) {
  return Json{{"name", r.name},
              {"hypotheses_hold", r.hypotheses_hold},
              {"inputs", r.inputs},
              {"lambda_lo", optional_number(r.lambda_lo)},
              {"lambda_hi", optional_number(r.lambda_hi)},
              {"bound", optional_number(r.bound)},
              {"probability", optional_number(r.probability)},
              {"verdict", r.verdict},
              {"margin", number(r.margin)},
              {"per_subspace", r.per_subspace},
              {"per_subspace_value", numbers(r.per_subspace_value)}};
}

CriterionReport criterion_report_from_json(const Json& j) {
  CriterionReport r;
  r.name = get<std::string>(j, "name");
  r.hypotheses_hold = get<bool>(j, "hypotheses_hold");
  r.inputs = get<std::map<std::string, double>>(j, "inputs");
  r.lambda_lo = optional_from(j, "lambda_lo");
  r.lambda_hi = optional_from(j, "lambda_hi");
  r.bound = optional_from(j, "bound");
  r.probability = optional_from(j, "probability");
  r.verdict = get<bool>(j, "verdict");
  r.margin = number_from(field(j, "margin"));
  r.per_subspace = get<std::vector<bool>>(j, "per_subspace");
  r.per_subspace_value = numbers_from(field(j, "per_subspace_value"));
  return r;
}

}  // namespace lsssc
