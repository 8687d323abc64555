#include "lsssc/generator.hpp"

#include "lsssc/errors.hpp"
#include "lsssc/rng.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace lsssc {

const char* to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::None: return "none";
    case NoiseKind::Ball: return "ball";
    case NoiseKind::Adversarial: return "adversarial";
    case NoiseKind::Missing: return "missing";
    case NoiseKind::Explicit: return "explicit";
  }
  return "none";
}

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "none") return NoiseKind::None;
  if (name == "ball") return NoiseKind::Ball;
  if (name == "adversarial") return NoiseKind::Adversarial;
  if (name == "missing") return NoiseKind::Missing;
  if (name == "explicit") return NoiseKind::Explicit;
  throw InvalidParameter("unknown noise kind '" + name + "'");
}

int GeneratorConfig::points_in(int k) const {
  return static_cast<int>(std::lround(kappas.at(k) * dims.at(k)));
}

int GeneratorConfig::total_points() const {
  int total = 0;
  for (int k = 0; k < num_subspaces(); ++k) total += points_in(k);
  return total;
}

int GeneratorConfig::missing_in(int k) const {
  if (noise.missing.empty()) return 0;
  if (noise.missing.size() == 1) return noise.missing.front();
  return noise.missing.at(k);
}

void GeneratorConfig::validate() const {
  if (ambient_dim < 1) throw InvalidParameter("ambient dimension must be >= 1");
  if (dims.empty()) throw InvalidParameter("need at least one subspace");
  if (kappas.size() != dims.size()) {
    throw InvalidParameter("got " + std::to_string(dims.size()) + " dims but " +
                           std::to_string(kappas.size()) + " kappas");
  }
  for (int k = 0; k < num_subspaces(); ++k) {
    if (dims[k] < 1 || dims[k] > ambient_dim) {
      throw InvalidParameter("subspace " + std::to_string(k + 1) + " has dimension " +
                             std::to_string(dims[k]) + " outside [1, " +
                             std::to_string(ambient_dim) + "]");
    }
    if (!(kappas[k] > 0.0) || points_in(k) < dims[k] + 1) {
      throw InvalidParameter("subspace " + std::to_string(k + 1) + ": round(kappa*d) = " +
                             std::to_string(points_in(k)) + " must be >= d + 1 = " +
                             std::to_string(dims[k] + 1));
    }
  }
  switch (noise.kind) {
    case NoiseKind::Ball:
    case NoiseKind::Adversarial:
      if (!(noise.delta >= 0.0)) throw InvalidParameter("noise radius delta must be >= 0");
      if (noise.kind == NoiseKind::Adversarial && num_subspaces() < 2 && noise.delta > 0.0) {
        throw InvalidParameter("adversarial noise needs at least two subspaces");
      }
      break;
    case NoiseKind::Missing:
      if (noise.missing.size() != 1 && noise.missing.size() != dims.size()) {
        throw InvalidParameter("missing counts must have one entry or one per subspace");
      }
      for (int m : noise.missing) {
        if (m < 0 || m >= ambient_dim) {
          throw InvalidParameter("missing count " + std::to_string(m) + " outside [0, n)");
        }
      }
      break;
    case NoiseKind::Explicit:
      if (noise.explicit_z.rows() != ambient_dim || noise.explicit_z.cols() != total_points()) {
        throw InvalidParameter("explicit Z has the wrong shape");
      }
      break;
    case NoiseKind::None: break;
  }
}

namespace {

Vector gaussian_vector(Engine& rng, Index size) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(size);
  for (Index i = 0; i < size; ++i) v(i) = normal(rng);
  return v;
}

Vector unit_gaussian(Engine& rng, Index size) {
  Vector v = gaussian_vector(rng, size);
  double norm = v.norm();
  while (norm == 0.0) {
    v = gaussian_vector(rng, size);
    norm = v.norm();
  }
  return v / norm;
}

}  // namespace

std::vector<Matrix> sample_subspaces(const GeneratorConfig& config) {
  const int n = config.ambient_dim;
  std::vector<Matrix> bases;
  bases.reserve(config.dims.size());
  for (int k = 0; k < config.num_subspaces(); ++k) {
    const int d = config.dims[k];
    if (d > n) {
      throw InvalidParameter("subspace dimension " + std::to_string(d) +
                             " exceeds ambient dimension " + std::to_string(n));
    }
    if (d < 1) throw InvalidParameter("subspace dimension must be >= 1");
    Engine rng = make_stream(config.seed, Stream::Subspace, static_cast<std::uint64_t>(k));
    Matrix g(n, d);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index j = 0; j < d; ++j)
      for (Index i = 0; i < n; ++i) g(i, j) = normal(rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(n, d);
    const Matrix r = qr.matrixQR().topLeftCorner(d, d);
    // Sign-fixing the diagonal of R makes Q Haar distributed.
    for (Index j = 0; j < d; ++j) {
      if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    }
    bases.push_back(std::move(q));
  }
  return bases;
}

PointSample sample_points(const std::vector<Matrix>& bases, const std::vector<double>& kappas,
                          std::uint64_t seed) {
  if (bases.empty() || bases.size() != kappas.size()) {
    throw InvalidParameter("need one kappa per basis");
  }
  const Index n = bases.front().rows();
  std::vector<int> counts;
  int total = 0;
  for (std::size_t k = 0; k < bases.size(); ++k) {
    if (bases[k].rows() != n) throw DimensionMismatch("bases disagree on ambient dimension");
    const int count = static_cast<int>(std::lround(kappas[k] * static_cast<double>(bases[k].cols())));
    if (count < 1) throw InvalidParameter("kappa too small: subspace would have no samples");
    counts.push_back(count);
    total += count;
  }
  Matrix Y(n, total);
  std::vector<int> labels;
  labels.reserve(total);
  Index col = 0;
  for (std::size_t k = 0; k < bases.size(); ++k) {
    const Matrix& U = bases[k];
    for (int s = 0; s < counts[k]; ++s, ++col) {
      Engine rng = make_stream(seed, Stream::Point, static_cast<std::uint64_t>(col));
      Vector y = U * unit_gaussian(rng, U.cols());
      y /= y.norm();
      Y.col(col) = y;
      labels.push_back(static_cast<int>(k) + 1);
    }
  }
  return PointSample{DataMatrix(std::move(Y), Role::Clean), std::move(labels)};
}

CorruptedData add_bounded_noise(const DataMatrix& Y, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0)) throw InvalidParameter("noise radius delta must be >= 0");
  const Index n = Y.rows();
  Matrix Z = Matrix::Zero(n, Y.cols());
  if (delta > 0.0) {
    for (Index i = 0; i < Y.cols(); ++i) {
      Engine rng = make_stream(seed, Stream::Noise, static_cast<std::uint64_t>(i));
      const Vector dir = unit_gaussian(rng, n);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      // Radius density proportional to t^(n-1) on [0, delta].
      const double radius = delta * std::pow(unif(rng), 1.0 / static_cast<double>(n));
      Z.col(i) = std::min(radius, delta) * dir;
    }
  }
  Matrix X = Y.values() + Z;
  return CorruptedData{DataMatrix(std::move(X), Role::Observed), DataMatrix(std::move(Z), Role::Noise),
                       std::nullopt};
}

CorruptedData add_adversarial_noise(const DataMatrix& Y, const std::vector<Matrix>& bases,
                                    const std::vector<int>& labels, double delta,
                                    std::uint64_t seed) {
  if (!(delta >= 0.0)) throw InvalidParameter("noise radius delta must be >= 0");
  if (static_cast<Index>(labels.size()) != Y.cols()) {
    throw DimensionMismatch("labels length does not match Y columns");
  }
  const Index n = Y.rows();
  Matrix Z = Matrix::Zero(n, Y.cols());
  if (delta > 0.0) {
    if (bases.size() < 2) throw InvalidParameter("adversarial noise needs at least two subspaces");
    for (Index i = 0; i < Y.cols(); ++i) {
      Engine rng = make_stream(seed, Stream::Noise, static_cast<std::uint64_t>(i));
      const int own = labels[i] - 1;
      std::uniform_int_distribution<int> pick(0, static_cast<int>(bases.size()) - 2);
      int other = pick(rng);
      if (other >= own) ++other;
      const Matrix& U = bases[other];
      Vector dir = U * (U.transpose() * Y.col(i));
      double norm = dir.norm();
      if (norm < 1e-14) {
        // y_i orthogonal to the target subspace: aim at a random point of it.
        dir = U * unit_gaussian(rng, U.cols());
        norm = dir.norm();
      }
      Z.col(i) = (delta / norm) * dir;
    }
  }
  Matrix X = Y.values() + Z;
  return CorruptedData{DataMatrix(std::move(X), Role::Observed), DataMatrix(std::move(Z), Role::Noise),
                       std::nullopt};
}

CorruptedData apply_missing(const DataMatrix& Y, const std::vector<int>& labels,
                            const std::vector<int>& missing_per_subspace, std::uint64_t seed) {
  const Index n = Y.rows();
  const Index N = Y.cols();
  if (static_cast<Index>(labels.size()) != N) {
    throw DimensionMismatch("labels length does not match Y columns");
  }
  for (int m : missing_per_subspace) {
    if (m < 0 || m >= n) {
      throw InvalidParameter("missing count " + std::to_string(m) + " must lie in [0, " +
                             std::to_string(n) + ")");
    }
  }
  MaskMatrix::Pattern observed = MaskMatrix::Pattern::Constant(n, N, true);
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < N; ++i) {
    const int l = labels[i];
    if (l < 1 || l > static_cast<int>(missing_per_subspace.size())) {
      throw InvalidParameter("label " + std::to_string(l) + " has no missing count");
    }
    const int m = missing_per_subspace[l - 1];
    Engine rng = make_stream(seed, Stream::Mask, static_cast<std::uint64_t>(i));
    std::iota(order.begin(), order.end(), Index{0});
    // Forward Fisher-Yates: the first m picks depend only on the stream, so
    // masks for increasing m are nested.
    for (Index t = 0; t < m; ++t) {
      std::uniform_int_distribution<Index> pick(t, n - 1);
      std::swap(order[t], order[pick(rng)]);
      observed(order[t], i) = false;
    }
  }
  Matrix X = Y.values().array() * observed.cast<double>();
  Matrix Z = X - Y.values();
  return CorruptedData{DataMatrix(std::move(X), Role::Observed), DataMatrix(std::move(Z), Role::Noise),
                       MaskMatrix(std::move(observed))};
}

Dataset generate_dataset(const GeneratorConfig& config) {
  config.validate();
  std::vector<Matrix> bases = sample_subspaces(config);
  PointSample points = sample_points(bases, config.kappas, config.seed);
  SubspaceEnsemble truth(bases, points.labels);
  switch (config.noise.kind) {
    case NoiseKind::None: {
      DataMatrix Z(Matrix::Zero(points.Y.rows(), points.Y.cols()), Role::Noise);
      DataMatrix X(points.Y.values(), Role::Observed);
      return Dataset{std::move(points.Y), std::move(X), std::move(Z), std::move(truth), std::nullopt};
    }
    case NoiseKind::Ball: {
      CorruptedData c = add_bounded_noise(points.Y, config.noise.delta, config.seed);
      return Dataset{std::move(points.Y), std::move(c.X), std::move(c.Z), std::move(truth), std::nullopt};
    }
    case NoiseKind::Adversarial: {
      CorruptedData c =
          add_adversarial_noise(points.Y, bases, points.labels, config.noise.delta, config.seed);
      return Dataset{std::move(points.Y), std::move(c.X), std::move(c.Z), std::move(truth), std::nullopt};
    }
    case NoiseKind::Missing: {
      std::vector<int> per(config.dims.size());
      for (int k = 0; k < config.num_subspaces(); ++k) per[k] = config.missing_in(k);
      CorruptedData c = apply_missing(points.Y, points.labels, per, config.seed);
      return Dataset{std::move(points.Y), std::move(c.X), std::move(c.Z), std::move(truth),
                     std::move(c.mask)};
    }
    case NoiseKind::Explicit: {
      Matrix X = points.Y.values() + config.noise.explicit_z;
      return Dataset{std::move(points.Y), DataMatrix(std::move(X), Role::Observed),
                     DataMatrix(config.noise.explicit_z, Role::Noise), std::move(truth), std::nullopt};
    }
  }
  throw InvalidParameter("unhandled noise kind");
}

}  // namespace lsssc
