#include "fairod/metrics/aggregate.hpp"

#include <algorithm>
#include <functional>
#include <limits>

#include "fairod/errors.hpp"

namespace fairod::metrics {

void ResultTable::validate() const {
  if (algorithms.empty() || datasets.empty()) throw ArgumentError("result table is empty");
  if (cells.size() != algorithms.size()) throw DimensionError("result table: row count mismatch");
  for (const auto& row : cells) {
    if (row.size() != datasets.size()) throw DimensionError("result table: column count mismatch");
  }
}

namespace {

// Mean over each algorithm's present cells of ratio(cell, column best).
std::vector<double> normalized_mean(const ResultTable& table, bool higher_is_better,
                                    const std::function<double(double, double)>& ratio) {
  table.validate();
  const std::size_t n_alg = table.algorithms.size();
  const std::size_t n_data = table.datasets.size();
  std::vector<double> best(n_data, higher_is_better ? -std::numeric_limits<double>::infinity()
                                                    : std::numeric_limits<double>::infinity());
  std::vector<bool> has_value(n_data, false);
  for (std::size_t a = 0; a < n_alg; ++a) {
    for (std::size_t d = 0; d < n_data; ++d) {
      if (const auto& v = table.cells[a][d]) {
        best[d] = higher_is_better ? std::max(best[d], *v) : std::min(best[d], *v);
        has_value[d] = true;
      }
    }
  }
  std::vector<double> out(n_alg, 0.0);
  for (std::size_t a = 0; a < n_alg; ++a) {
    double total = 0.0;
    int used = 0;
    for (std::size_t d = 0; d < n_data; ++d) {
      if (const auto& v = table.cells[a][d]; v && has_value[d]) {
        total += ratio(*v, best[d]);
        ++used;
      }
    }
    if (used == 0) throw ArgumentError("algorithm '" + table.algorithms[a] + "' has no results");
    out[a] = total / used;
  }
  return out;
}

}  // namespace

std::vector<double> score_auc(const ResultTable& table) {
  return normalized_mean(table, true, [](double v, double best) {
    if (best <= 0.0) throw ArgumentError("score_auc: best AUC on a dataset is not positive");
    return v / best;
  });
}

std::vector<double> score_f(const ResultTable& table, double epsilon) {
  return normalized_mean(table, false, [epsilon](double v, double best) {
    if (v < 0.0) throw ArgumentError("score_f: fairness values must be non-negative");
    return (best + epsilon) / (v + epsilon);
  });
}

}  // namespace fairod::metrics
