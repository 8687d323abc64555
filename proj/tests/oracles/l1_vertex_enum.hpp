#pragma once
// Oracle for min ||c||_1 s.t. B c = y: an optimal basic solution exists, so
// enumerate every column subset of size rank(B), solve on it and keep the
// feasible candidate with the smallest l1 norm.

#include <Eigen/Dense>

#include <limits>
#include <vector>

namespace oracle {

inline double min_l1_by_vertex_enumeration(const Eigen::VectorXd& y, const Eigen::MatrixXd& B) {
  const int k = static_cast<int>(B.cols());
  Eigen::FullPivLU<Eigen::MatrixXd> full(B);
  const int r = static_cast<int>(full.rank());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> idx(r);
  for (int j = 0; j < r; ++j) idx[j] = j;
  while (true) {
    Eigen::MatrixXd Bs(B.rows(), r);
    for (int a = 0; a < r; ++a) Bs.col(a) = B.col(idx[a]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Bs);
    if (qr.rank() == r) {
      const Eigen::VectorXd cs = qr.solve(y);
      if ((Bs * cs - y).norm() <= 1e-10 * std::max(1.0, y.norm())) {
        best = std::min(best, cs.cwiseAbs().sum());
      }
    }
    int j = r - 1;
    while (j >= 0 && idx[j] == k - r + j) --j;
    if (j < 0) break;
    ++idx[j];
    for (int t = j + 1; t < r; ++t) idx[t] = idx[t - 1] + 1;
  }
  return best;
}

}  // namespace oracle
