#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fairod::numcore {

/// A named parameter block together with its analytic gradient (same length).
struct GradientBlock {
  std::string name;
  std::span<double> params;
  std::span<const double> analytic;
};

struct BlockCheck {
  std::string name;
  std::size_t size = 0;
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  bool passed = false;
};

struct GradCheckReport {
  std::vector<BlockCheck> blocks;
  double max_relative_error = 0.0;
  bool passed = true;
};

/// |a - n| / max(|a|, |n|, floor). The floor keeps entries whose true gradient is ~0 from
/// reporting noise-dominated ratios.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

/// Compares analytic gradients to central differences (L(t+h) - L(t-h)) / 2h, perturbing one
/// entry at a time. `loss` must be deterministic and read parameters through the spans' storage.
/// The analytic spans must stay valid (and unchanged) for the duration of the call.
inline GradCheckReport check_gradients(const std::vector<GradientBlock>& blocks,
                                       const std::function<double()>& loss, double tolerance,
                                       double step = 1e-5) {
  GradCheckReport report;
  for (const auto& block : blocks) {
    BlockCheck check{block.name, block.params.size()};
    for (std::size_t i = 0; i < block.params.size(); ++i) {
      const double original = block.params[i];
      block.params[i] = original + step;
      const double up = loss();
      block.params[i] = original - step;
      const double down = loss();
      block.params[i] = original;
      const double numeric = (up - down) / (2.0 * step);
      check.max_relative_error =
          std::max(check.max_relative_error, relative_error(block.analytic[i], numeric));
      check.max_absolute_error =
          std::max(check.max_absolute_error, std::abs(block.analytic[i] - numeric));
    }
    check.passed = check.max_relative_error < tolerance;
    report.max_relative_error = std::max(report.max_relative_error, check.max_relative_error);
    report.passed = report.passed && check.passed;
    report.blocks.push_back(std::move(check));
  }
  return report;
}

}  // namespace fairod::numcore
