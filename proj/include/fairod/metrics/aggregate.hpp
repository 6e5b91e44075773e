#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fairod::metrics {

inline constexpr double kScoreFEpsilon = 1e-5;

/// Algorithm x dataset results; a missing cell (nullopt) drops that dataset for that algorithm
/// and excludes the cell from the per-dataset best.
struct ResultTable {
  std::vector<std::string> algorithms;
  std::vector<std::string> datasets;
  std::vector<std::vector<std::optional<double>>> cells;  // [algorithm][dataset]

  void validate() const;
};

/// Per algorithm: mean over its datasets of AUC / best AUC on that dataset.
std::vector<double> score_auc(const ResultTable& table);

/// Per algorithm: mean over its datasets of (best F + eps) / (F + eps), best = lowest.
std::vector<double> score_f(const ResultTable& table, double epsilon = kScoreFEpsilon);

}  // namespace fairod::metrics
