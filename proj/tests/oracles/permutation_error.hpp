#pragma once
// Brute-force clustering error: try every injective renaming of predicted
// labels onto true labels.

#include <algorithm>
#include <map>
#include <vector>

namespace oracle {

inline double clustering_error_brute(const std::vector<int>& pred, const std::vector<int>& truth) {
  std::vector<int> p_labels(pred), t_labels(truth);
  std::sort(p_labels.begin(), p_labels.end());
  p_labels.erase(std::unique(p_labels.begin(), p_labels.end()), p_labels.end());
  std::sort(t_labels.begin(), t_labels.end());
  t_labels.erase(std::unique(t_labels.begin(), t_labels.end()), t_labels.end());
  // Pad the true side with dummies so every predicted label gets a target.
  std::vector<int> targets(t_labels);
  while (targets.size() < p_labels.size()) targets.push_back(-1000000 - static_cast<int>(targets.size()));
  std::sort(targets.begin(), targets.end());
  const std::size_t N = pred.size();
  std::size_t best = 0;
  do {
    std::map<int, int> rename;
    for (std::size_t a = 0; a < p_labels.size(); ++a) rename[p_labels[a]] = targets[a];
    std::size_t hits = 0;
    for (std::size_t i = 0; i < N; ++i) hits += rename[pred[i]] == truth[i];
    best = std::max(best, hits);
  } while (std::next_permutation(targets.begin(), targets.end()));
  return static_cast<double>(N - best) / static_cast<double>(N);
}

}  // namespace oracle
