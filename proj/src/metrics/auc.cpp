#include "fairod/metrics/auc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "fairod/errors.hpp"

namespace fairod::metrics {

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw DimensionError("auc: " + std::to_string(scores.size()) + " scores vs " +
                         std::to_string(labels.size()) + " labels");
  }
  std::size_t positives = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw ArgumentError("auc: labels must be 0 or 1");
    if (!std::isfinite(scores[i])) throw ArgumentError("auc: non-finite score");
    positives += static_cast<std::size_t>(labels[i]);
  }
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw UndefinedMetricError("auc: labels contain a single class");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Twice the rank sum of positives keeps mid-ranks integral.
  double rank_sum_x2 = 0.0;
  for (std::size_t start = 0; start < order.size();) {
    std::size_t stop = start + 1;
    while (stop < order.size() && scores[order[stop]] == scores[order[start]]) ++stop;
    const double mid_rank_x2 = static_cast<double>(start + 1 + stop);  // 2 * mean of ranks start+1..stop
    for (std::size_t i = start; i < stop; ++i) {
      if (labels[order[i]] == 1) rank_sum_x2 += mid_rank_x2;
    }
    start = stop;
  }
  const double p = static_cast<double>(positives);
  const double u = 0.5 * (rank_sum_x2 - p * (p + 1.0));
  return u / (p * static_cast<double>(negatives));
}

}  // namespace fairod::metrics
