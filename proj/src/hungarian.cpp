#include "lsssc/clustering.hpp"

#include <algorithm>
#include <limits>

namespace lsssc {

// Shortest augmenting path version on a square cost matrix (minimization).
std::vector<int> hungarian_max(const Matrix& weights) {
  const int rows = static_cast<int>(weights.rows());
  const int cols = static_cast<int>(weights.cols());
  const int n = std::max(rows, cols);
  if (n == 0) return {};
  const double top = weights.size() ? weights.maxCoeff() : 0.0;
  Matrix cost = Matrix::Constant(n, n, top);
  cost.topLeftCorner(rows, cols) = top - weights.array();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<bool> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> match(rows, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] >= 1 && p[j] <= rows && j <= cols) match[p[j] - 1] = j - 1;
  }
  return match;
}

}  // namespace lsssc
