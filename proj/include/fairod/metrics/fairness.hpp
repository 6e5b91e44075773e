#pragma once

#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace fairod::metrics {

struct GapResult {
  double gap = 0.0;
  std::vector<std::optional<double>> subgroup_auc;  // nullopt: subgroup lacks one class
};

/// Highest minus lowest per-subgroup AUC. Subgroups without both classes are skipped (with a
/// warning); fewer than two usable subgroups is an UndefinedMetricError.
GapResult f_gap(std::span<const double> scores, std::span<const int> labels,
                std::span<const int> subgroups, int num_subgroups);

inline constexpr int kRankLow = 5;
inline constexpr int kRankHigh = 20;
inline constexpr double kRankSmoothing = 1e-9;

struct RankResult {
  double value = 0.0;          // max over the sweep
  std::vector<double> sweep;   // KL(d_r || d_ref) for r = kRankLow..kRankHigh
};

/// Largest KL divergence between the subgroup mix of the top ceil(r N / 100) scores and the
/// whole dataset's mix, r = 5..20. Ranking is by score descending then row index ascending;
/// both distributions get add-lambda smoothing (lambda = 1e-9 per subgroup). Requires N >= 20.
RankResult f_rank(std::span<const double> scores, std::span<const int> subgroups, int num_subgroups);

/// D_KL(p || q) = sum p log(p / q); terms with p = 0 contribute 0.
double kl_divergence(std::span<const double> p, std::span<const double> q);

struct MetricReport {
  double auc = 0.0;
  std::vector<std::optional<double>> subgroup_auc;
  std::optional<double> f_gap;  // nullopt when fewer than two subgroups have both classes
  double f_rank = 0.0;
  std::vector<double> rank_sweep;

  bool operator==(const MetricReport&) const = default;
};

MetricReport evaluate(std::span<const double> scores, std::span<const int> labels,
                      std::span<const int> subgroups, int num_subgroups);

void to_json(nlohmann::json& j, const MetricReport& r);
void from_json(const nlohmann::json& j, MetricReport& r);

}  // namespace fairod::metrics
