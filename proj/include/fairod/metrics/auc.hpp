#pragma once

#include <span>

namespace fairod::metrics {

/// Area under the ROC curve for outlier scores (label 1 = outlier, higher score = more
/// anomalous), with score ties counted as half. Rank-sum with mid-ranks, O(N log N).
/// Throws UndefinedMetricError unless both classes are present.
double auc(std::span<const double> scores, std::span<const int> labels);

}  // namespace fairod::metrics
