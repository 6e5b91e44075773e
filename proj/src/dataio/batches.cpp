#include "fairod/dataio/batches.hpp"

#include <numeric>

#include "fairod/errors.hpp"
#include "fairod/numcore/random.hpp"

namespace fairod::dataio {

std::vector<std::vector<Index>> iterate_batches(Index n, const BatchPlan& plan, int epoch) {
  if (plan.batch_size < 1) throw ArgumentError("batch size must be at least 1");
  if (n < 0) throw ArgumentError("negative dataset size");
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  auto rng = numcore::make_stream(plan.seed, /*stream=*/0xba7c, static_cast<std::uint64_t>(epoch));
  numcore::shuffle(perm, rng);

  std::vector<std::vector<Index>> batches;
  for (Index start = 0; start < n; start += plan.batch_size) {
    const Index stop = std::min(n, start + plan.batch_size);
    batches.emplace_back(perm.begin() + start, perm.begin() + stop);
  }
  return batches;
}

}  // namespace fairod::dataio
