#pragma once

#include <cstdint>
#include <vector>

#include "fairod/numcore/matrix.hpp"

namespace fairod::dataio {

using numcore::Index;

struct BatchPlan {
  Index batch_size = 64;
  std::uint64_t seed = 0;
  int epochs = 90;
};

/// Shuffled contiguous slices of a permutation of [0, n), fixed by (plan.seed, epoch).
/// The final partial batch is kept.
std::vector<std::vector<Index>> iterate_batches(Index n, const BatchPlan& plan, int epoch);

}  // namespace fairod::dataio
