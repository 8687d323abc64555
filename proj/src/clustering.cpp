#include "lsssc/clustering.hpp"

#include "lsssc/errors.hpp"
#include "lsssc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace lsssc {

AffinityGraph build_affinity(const Matrix& C) {
  if (C.rows() != C.cols()) throw DimensionMismatch("C must be square");
  Matrix W = C.cwiseAbs() + C.transpose().cwiseAbs();
  W.diagonal().setZero();
  return affinity_from_weights(W);
}

AffinityGraph affinity_from_weights(const Matrix& W) {
  const Index N = W.rows();
  if (W.cols() != N) throw DimensionMismatch("W must be square");
  if (N < 1) throw InvalidParameter("affinity needs at least one vertex");
  if ((W.array() < 0.0).any() || !W.allFinite()) {
    throw InvalidParameter("affinity weights must be finite and non-negative");
  }
  AffinityGraph g;
  g.W = W;
  g.trivial = (W.array() == 0.0).all();
  g.degrees = W.rowwise().sum();
  g.isolated.assign(static_cast<std::size_t>(N), false);
  Vector inv_sqrt(N);
  for (Index i = 0; i < N; ++i) {
    double deg = g.degrees(i);
    if (deg <= 0.0) {
      g.isolated[i] = true;
      deg = kIsolatedDegree;
    }
    inv_sqrt(i) = 1.0 / std::sqrt(deg);
  }
  Matrix lap = -(inv_sqrt.asDiagonal() * W * inv_sqrt.asDiagonal());
  lap.diagonal().array() += 1.0;
  lap = 0.5 * (lap + lap.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(lap);
  if (eig.info() != Eigen::Success) throw DegenerateGraph("Laplacian eigendecomposition failed");
  g.eigenvalues = eig.eigenvalues().reverse();
  g.eigenvectors = eig.eigenvectors().rowwise().reverse();
  return g;
}

const char* to_string(GapScale scale) { return scale == GapScale::Linear ? "linear" : "log"; }

GapScale gap_scale_from_string(const std::string& name) {
  if (name == "linear") return GapScale::Linear;
  if (name == "log") return GapScale::Log;
  throw InvalidParameter("unknown gap scale '" + name + "'");
}

int estimate_num_clusters(const AffinityGraph& graph, GapScale scale) {
  if (graph.trivial) throw DegenerateGraph("affinity matrix is identically zero");
  const Index N = graph.eigenvalues.size();
  if (N < 2) throw InvalidParameter("cluster-count estimate needs N >= 2");
  Vector s = graph.eigenvalues;
  if (scale == GapScale::Log) {
    s = (s.array().max(0.0) + kLogGapFloor).log().matrix();
  }
  Index best_i = 1;
  double best_gap = s(0) - s(1);
  for (Index i = 2; i <= N - 1; ++i) {
    const double gap = s(i - 1) - s(i);
    if (gap > best_gap + 1e-12) {
      best_gap = gap;
      best_i = i;
    }
  }
  return static_cast<int>(N - best_i);
}

namespace {

KMeansResult kmeans_once(const Matrix& P, int k, Engine& rng, int max_iterations) {
  const Index n = P.rows();
  Matrix centers(k, P.cols());
  // k-means++ seeding.
  std::uniform_int_distribution<Index> pick(0, n - 1);
  centers.row(0) = P.row(pick(rng));
  Vector d2 = (P.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Index chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> unit(0.0, total);
      double target = unit(rng);
      chosen = n - 1;
      for (Index i = 0; i < n; ++i) {
        target -= d2(i);
        if (target < 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = pick(rng);
    }
    centers.row(c) = P.row(chosen);
    d2 = d2.cwiseMin((P.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  KMeansResult out;
  out.assignment.assign(static_cast<std::size_t>(n), -1);
  for (int it = 0; it < max_iterations; ++it) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      (centers.rowwise() - P.row(i)).rowwise().squaredNorm().minCoeff(&best);
      if (out.assignment[i] != static_cast<int>(best)) {
        out.assignment[i] = static_cast<int>(best);
        changed = true;
      }
    }
    if (!changed) break;
    Matrix sums = Matrix::Zero(k, P.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(out.assignment[i]) += P.row(i);
      ++counts[out.assignment[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) centers.row(c) = sums.row(c) / static_cast<double>(counts[c]);
    }
  }
  out.inertia = 0.0;
  for (Index i = 0; i < n; ++i) out.inertia += (P.row(i) - centers.row(out.assignment[i])).squaredNorm();
  return out;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts,
                    int max_iterations) {
  if (k < 1 || points.rows() < 1) throw InvalidParameter("k-means needs k >= 1 and points");
  if (restarts < 1) throw InvalidParameter("k-means needs at least one restart");
  k = static_cast<int>(std::min<Index>(k, points.rows()));
  std::vector<KMeansResult> runs(static_cast<std::size_t>(restarts));
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < restarts; ++r) {
    Engine rng = make_stream(seed, Stream::KMeans, static_cast<std::uint64_t>(r));
    runs[r] = kmeans_once(points, k, rng, max_iterations);
  }
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].inertia < runs[best].inertia) best = r;
  return runs[best];
}

SpectralResult spectral_cluster(const AffinityGraph& graph, int num_clusters, std::uint64_t seed,
                                int restarts) {
  const Index N = graph.eigenvalues.size();
  if (num_clusters < 1) throw InvalidParameter("number of clusters must be at least 1");
  SpectralResult out;
  if (num_clusters == 1) {
    out.labels.assign(static_cast<std::size_t>(N), 1);
    return out;
  }
  if (num_clusters >= N) {
    for (Index i = 0; i < N; ++i) out.labels.push_back(static_cast<int>(i + 1));
    return out;
  }
  // Eigenvectors of the num_clusters smallest eigenvalues sit in the last columns.
  Matrix emb = graph.eigenvectors.rightCols(num_clusters);
  for (Index i = 0; i < N; ++i) {
    const double nrm = emb.row(i).norm();
    if (nrm > 0.0) emb.row(i) /= nrm;
  }
  int distinct = 0;
  for (Index i = 0; i < N && distinct < num_clusters; ++i) {
    bool seen = false;
    for (Index j = 0; j < i && !seen; ++j) seen = (emb.row(i) - emb.row(j)).norm() <= 1e-12;
    if (!seen) ++distinct;
  }
  out.degenerate_embedding = distinct < num_clusters;
  const KMeansResult km = kmeans(emb, num_clusters, seed, restarts);
  out.inertia = km.inertia;
  std::map<int, int> rename;
  for (int a : km.assignment) {
    auto it = rename.find(a);
    if (it == rename.end()) it = rename.emplace(a, static_cast<int>(rename.size()) + 1).first;
    out.labels.push_back(it->second);
  }
  return out;
}

double clustering_error(const std::vector<int>& predicted, const std::vector<int>& truth,
                        const std::vector<bool>& flagged) {
  if (predicted.size() != truth.size()) {
    throw DimensionMismatch("label vectors have lengths " + std::to_string(predicted.size()) +
                            " and " + std::to_string(truth.size()));
  }
  if (!flagged.empty() && flagged.size() != truth.size()) {
    throw DimensionMismatch("flag vector length differs from labels");
  }
  const std::size_t N = truth.size();
  if (N == 0) return 0.0;
  std::map<int, int> pid, tid;
  for (int p : predicted) pid.emplace(p, 0);
  for (int t : truth) tid.emplace(t, 0);
  int next = 0;
  for (auto& [label, idx] : pid) idx = next++;
  next = 0;
  for (auto& [label, idx] : tid) idx = next++;
  Matrix overlap = Matrix::Zero(static_cast<Index>(pid.size()), static_cast<Index>(tid.size()));
  for (std::size_t i = 0; i < N; ++i) {
    if (!flagged.empty() && flagged[i]) continue;
    overlap(pid[predicted[i]], tid[truth[i]]) += 1.0;
  }
  const bool transpose = overlap.rows() > overlap.cols();
  const Matrix w = transpose ? Matrix(overlap.transpose()) : overlap;
  const std::vector<int> match = hungarian_max(w);
  double matched = 0.0;
  for (std::size_t r = 0; r < match.size(); ++r)
    if (match[r] >= 0) matched += w(static_cast<Index>(r), match[r]);
  return (static_cast<double>(N) - matched) / static_cast<double>(N);
}

}  // namespace lsssc
