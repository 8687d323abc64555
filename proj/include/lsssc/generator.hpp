#pragma once

#include "lsssc/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace lsssc {

enum class NoiseKind {
  None,
  /// z_i uniform in the radius-delta ball.
  Ball,
  /// z_i of norm delta along the projection of y_i onto a random other subspace.
  Adversarial,
  /// Exactly m_l zero-filled entries per column of subspace l.
  Missing,
  /// Caller-supplied Z.
  Explicit,
};

const char* to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::None;
  double delta = 0.0;
  /// One count per subspace, or a single count applied to all.
  std::vector<int> missing;
  Matrix explicit_z;
};

/// Parameters of the random union-of-subspaces model plus a corruption.
struct GeneratorConfig {
  int ambient_dim = 0;
  std::vector<int> dims;
  std::vector<double> kappas;
  NoiseSpec noise;
  std::uint64_t seed = 0;

  int num_subspaces() const noexcept { return static_cast<int>(dims.size()); }
  /// N_l = round(kappa_l d_l).
  int points_in(int k) const;
  int total_points() const;
  /// Missing count for subspace k (0-based).
  int missing_in(int k) const;
  /// Throws InvalidParameter on any violated constraint.
  void validate() const;
};

/// Haar-distributed orthonormal bases, one per subspace.
std::vector<Matrix> sample_subspaces(const GeneratorConfig& config);

struct PointSample {
  DataMatrix Y;
  std::vector<int> labels;
};

/// Unit-norm samples, uniform on each subspace's sphere. Columns are grouped
/// by subspace in label order.
PointSample sample_points(const std::vector<Matrix>& bases, const std::vector<double>& kappas,
                          std::uint64_t seed);

struct CorruptedData {
  DataMatrix X;
  DataMatrix Z;
  std::optional<MaskMatrix> mask;
};

/// X = Y + Z with z_i uniform in the delta-ball, independent across columns.
CorruptedData add_bounded_noise(const DataMatrix& Y, double delta, std::uint64_t seed);

/// ||z_i|| = delta, aimed at a randomly chosen other subspace.
CorruptedData add_adversarial_noise(const DataMatrix& Y, const std::vector<Matrix>& bases,
                                    const std::vector<int>& labels, double delta,
                                    std::uint64_t seed);

/// Zero-fills exactly missing[l-1] entries of every column with label l.
/// Mask positions come from per-column streams and never look at Y, and for
/// a fixed seed the masks are nested in m.
CorruptedData apply_missing(const DataMatrix& Y, const std::vector<int>& labels,
                            const std::vector<int>& missing_per_subspace, std::uint64_t seed);

struct Dataset {
  DataMatrix Y;
  DataMatrix X;
  DataMatrix Z;
  SubspaceEnsemble truth;
  std::optional<MaskMatrix> mask;
};

Dataset generate_dataset(const GeneratorConfig& config);

}  // namespace lsssc
