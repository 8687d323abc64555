#pragma once
// Direction-sweep oracle for min over unit u of max_j |<g_j, u>|, the
// inradius of conv(+-g_j) in coordinates (columns of G are the g_j).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

inline double support_max(const Eigen::MatrixXd& G, const Eigen::VectorXd& u) {
  return (G.transpose() * u).cwiseAbs().maxCoeff();
}

/// Uniform sweep of `count` angles on the half circle (the objective is even).
inline double inradius_sweep_2d(const Eigen::MatrixXd& G, long count = 1000000) {
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd u(2);
  for (long t = 0; t < count; ++t) {
    const double a = std::numbers::pi * static_cast<double>(t) / static_cast<double>(count);
    u << std::cos(a), std::sin(a);
    best = std::min(best, support_max(G, u));
  }
  return best;
}

inline Eigen::Vector3d spherical(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

/// Fibonacci sweep of `coarse` directions, then a fine local grid around the
/// best `keep` directions, repeated with shrinking radius.
inline double inradius_sweep_3d(const Eigen::MatrixXd& G, long coarse = 500000, int keep = 20) {
  struct Cand {
    double value;
    double theta;
    double phi;
  };
  std::vector<Cand> cands;
  cands.reserve(static_cast<std::size_t>(coarse));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (long t = 0; t < coarse; ++t) {
    const double z = 1.0 - 2.0 * (static_cast<double>(t) + 0.5) / static_cast<double>(coarse);
    const double theta = std::acos(z);
    const double phi = golden * static_cast<double>(t);
    cands.push_back({support_max(G, spherical(theta, phi)), theta, phi});
  }
  std::partial_sort(cands.begin(), cands.begin() + keep, cands.end(),
                    [](const Cand& a, const Cand& b) { return a.value < b.value; });
  double best = cands.front().value;
  const double spacing = std::sqrt(4.0 * std::numbers::pi / static_cast<double>(coarse));
  for (int c = 0; c < keep; ++c) {
    double theta0 = cands[c].theta;
    double phi0 = cands[c].phi;
    double radius = 2.0 * spacing;
    double local = cands[c].value;
    for (int round = 0; round < 6; ++round) {
      const int steps = 20;
      double bt = theta0, bp = phi0;
      for (int a = -steps; a <= steps; ++a) {
        for (int b = -steps; b <= steps; ++b) {
          const double th = theta0 + radius * a / steps;
          const double ph = phi0 + radius * b / steps / std::max(0.05, std::sin(theta0));
          const double v = support_max(G, spherical(th, ph));
          if (v < local) {
            local = v;
            bt = th;
            bp = ph;
          }
        }
      }
      theta0 = bt;
      phi0 = bp;
      radius /= 8.0;
    }
    best = std::min(best, local);
  }
  return best;
}

}  // namespace oracle
