#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairod/numcore/gradcheck.hpp"

namespace fairod::dcfod {

struct ObjectiveCheck {
  std::string term;  // "L_s", "L_f (discriminator)", "L_f (encoder)", "L_r", "objective"
  std::size_t parameters = 0;
  numcore::GradCheckReport report;
};

/// Finite-difference check of every training loss on a tiny model (2-3-2 networks, K = 2,
/// batch of 8) with the batch weights and targets frozen at their initial values.
std::vector<ObjectiveCheck> run_objective_gradcheck(std::uint64_t seed, double tolerance = 1e-4);

}  // namespace fairod::dcfod
