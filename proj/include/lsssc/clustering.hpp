#pragma once

#include "lsssc/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lsssc {

struct AffinityGraph {
  /// W = |C| + |C|^T with zero diagonal.
  Matrix W;
  Vector degrees;
  /// Eigenvalues of I - D^{-1/2} W D^{-1/2}, nonincreasing.
  Vector eigenvalues;
  /// Eigenvectors matching `eigenvalues` column by column.
  Matrix eigenvectors;
  /// Zero-degree vertices; their degree is replaced by kIsolatedDegree.
  std::vector<bool> isolated;
  /// W is identically zero.
  bool trivial = false;
};

inline constexpr double kIsolatedDegree = 1e-12;

/// C must be square. The diagonal of C is ignored.
AffinityGraph build_affinity(const Matrix& C);
/// Builds the Laplacian spectrum of an already symmetric affinity W.
AffinityGraph affinity_from_weights(const Matrix& W);

/// How eigenvalue gaps are measured when estimating the cluster count.
enum class GapScale {
  /// sigma_i - sigma_{i+1}.
  Linear,
  /// log(sigma_i + eta) - log(sigma_{i+1} + eta) with eta = kLogGapFloor.
  Log,
};

inline constexpr double kLogGapFloor = 1e-3;

const char* to_string(GapScale scale);
GapScale gap_scale_from_string(const std::string& name);

/// N - argmax_i gap(sigma_i, sigma_{i+1}) over i = 1..N-1, ties to the
/// smallest i. Throws DegenerateGraph when W = 0.
int estimate_num_clusters(const AffinityGraph& graph, GapScale scale = GapScale::Linear);

struct SpectralResult {
  /// 1-based, numbered by first appearance.
  std::vector<int> labels;
  /// Fewer than L_hat distinct embedding rows, so some clusters merged.
  bool degenerate_embedding = false;
  double inertia = 0.0;
};

inline constexpr int kKMeansRestarts = 20;

SpectralResult spectral_cluster(const AffinityGraph& graph, int num_clusters, std::uint64_t seed,
                                int restarts = kKMeansRestarts);

struct KMeansResult {
  std::vector<int> assignment;  // 0-based
  double inertia = 0.0;
};

/// Lloyd iterations from k-means++ seeds, best inertia over restarts (ties
/// to the lower restart index). Rows of `points` are the samples.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts = kKMeansRestarts,
                    int max_iterations = 300);

/// Minimum over label matchings of the mismatch fraction. Vertices marked in
/// `flagged` always count as errors.
double clustering_error(const std::vector<int>& predicted, const std::vector<int>& truth,
                        const std::vector<bool>& flagged = {});

/// Maximum-weight assignment of rows to columns of a non-negative matrix
/// (rows <= cols after padding). Returns the column of each row.
std::vector<int> hungarian_max(const Matrix& weights);

}  // namespace lsssc
