#pragma once

#include <span>

#include "fairod/numcore/matrix.hpp"

namespace fairod::metrics {

struct ProbeOptions {
  int iterations = 500;
  double learning_rate = 0.5;
  double l2 = 1e-4;
};

struct ProbeResult {
  double accuracy = 0.0;       // on held-out rows
  double majority_rate = 0.0;  // share of the most common subgroup among held-out rows
};

/// How well a frozen representation predicts subgroup membership: multinomial logistic
/// regression fit by full-batch gradient descent on even rows, scored on odd rows. Features are
/// standardized with the training rows' statistics.
ProbeResult subgroup_probe(const numcore::Matrix& features, std::span<const int> subgroups, int num_subgroups,
                           const ProbeOptions& options = {});

}  // namespace fairod::metrics
