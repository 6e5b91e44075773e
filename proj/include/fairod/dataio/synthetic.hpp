#pragma once

#include <cstdint>
#include <filesystem>

#include "fairod/dataio/dataset.hpp"

namespace fairod::dataio {

/// Gaussian blobs as inliers plus uniform-box outliers, with a two-valued sensitive attribute.
///
/// Subgroup 1 is drawn with probability 0.5 for inliers and 0.5 + subgroup_bias for outliers,
/// so the bias correlates group membership with outlierness. Independently of that, the last
/// feature is shifted by +/- proxy_shift * cluster_std according to the group, which plants a
/// recoverable proxy for the sensitive attribute in the features.
struct SyntheticConfig {
  Index clusters = 4;
  Index n = 1000;
  Index dims = 10;
  double outlier_rate = 0.1;
  double subgroup_bias = 0.0;
  std::uint64_t seed = 0;
  double cluster_std = 1.0;
  double center_range = 6.0;   // centers ~ U(-center_range, center_range)^dims
  double outlier_range = 9.0;  // outliers ~ U(-outlier_range, outlier_range)^dims
  double proxy_shift = 0.75;

  void validate() const;
};

struct SyntheticData {
  Matrix raw;  // unstandardized features, as written to CSV
  Dataset dataset;
};

SyntheticData make_synthetic(const SyntheticConfig& config);

/// Writes `<stem>.csv` and `<stem>.schema.json` into `dir`; returns the CSV path.
std::filesystem::path write_synthetic(const SyntheticData& data, const std::filesystem::path& dir,
                                      const std::string& stem = "synthetic");

}  // namespace fairod::dataio
