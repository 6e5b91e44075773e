#include "fairod/metrics/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <spdlog/spdlog.h>

#include "fairod/errors.hpp"
#include "fairod/metrics/auc.hpp"

namespace fairod::metrics {

namespace {

void check_subgroups(std::span<const int> subgroups, int num_subgroups, std::size_t n) {
  if (subgroups.size() != n) throw DimensionError("subgroup count does not match scores");
  if (num_subgroups < 1) throw ArgumentError("need at least one subgroup");
  for (int s : subgroups) {
    if (s < 0 || s >= num_subgroups) throw ArgumentError("subgroup index out of range");
  }
}

std::vector<double> smoothed_distribution(const std::vector<double>& counts, double total) {
  const double m = static_cast<double>(counts.size());
  std::vector<double> d(counts.size());
  for (std::size_t s = 0; s < counts.size(); ++s) {
    d[s] = (counts[s] / total + kRankSmoothing) / (1.0 + m * kRankSmoothing);
  }
  return d;
}

}  // namespace

GapResult f_gap(std::span<const double> scores, std::span<const int> labels, std::span<const int> subgroups,
                int num_subgroups) {
  if (labels.size() != scores.size()) throw DimensionError("f_gap: label count does not match scores");
  check_subgroups(subgroups, num_subgroups, scores.size());
  GapResult result;
  result.subgroup_auc.resize(static_cast<std::size_t>(num_subgroups));
  std::vector<double> valid;
  for (int g = 0; g < num_subgroups; ++g) {
    std::vector<double> s;
    std::vector<int> y;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (subgroups[i] == g) {
        s.push_back(scores[i]);
        y.push_back(labels[i]);
      }
    }
    const int pos = std::accumulate(y.begin(), y.end(), 0);
    if (pos == 0 || pos == static_cast<int>(y.size())) {
      spdlog::warn("f_gap: subgroup {} has {} rows and lacks one class; excluded", g, y.size());
      continue;
    }
    const double a = auc(s, y);
    result.subgroup_auc[static_cast<std::size_t>(g)] = a;
    valid.push_back(a);
  }
  if (valid.size() < 2) {
    throw UndefinedMetricError("f_gap: fewer than two subgroups contain both classes");
  }
  const auto [lo, hi] = std::minmax_element(valid.begin(), valid.end());
  result.gap = *hi - *lo;
  return result;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DimensionError("kl_divergence: length mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) total += p[i] * std::log(p[i] / q[i]);
  }
  return total;
}

RankResult f_rank(std::span<const double> scores, std::span<const int> subgroups, int num_subgroups) {
  check_subgroups(subgroups, num_subgroups, scores.size());
  const std::size_t n = scores.size();
  if (n < 20) throw UndefinedMetricError("f_rank: needs at least 20 rows, got " + std::to_string(n));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<double> all(static_cast<std::size_t>(num_subgroups), 0.0);
  for (int s : subgroups) all[static_cast<std::size_t>(s)] += 1.0;
  const auto reference = smoothed_distribution(all, static_cast<double>(n));

  RankResult result;
  std::vector<double> top(static_cast<std::size_t>(num_subgroups), 0.0);
  std::size_t taken = 0;
  for (int r = kRankLow; r <= kRankHigh; ++r) {
    // ceil(r * n / 100) in integer arithmetic, at least one row.
    const std::size_t count = std::max<std::size_t>(1, (static_cast<std::size_t>(r) * n + 99) / 100);
    for (; taken < count; ++taken) top[static_cast<std::size_t>(subgroups[order[taken]])] += 1.0;
    const auto d = smoothed_distribution(top, static_cast<double>(count));
    result.sweep.push_back(kl_divergence(d, reference));
  }
  result.value = *std::max_element(result.sweep.begin(), result.sweep.end());
  return result;
}

MetricReport evaluate(std::span<const double> scores, std::span<const int> labels, std::span<const int> subgroups,
                      int num_subgroups) {
  MetricReport report;
  report.auc = auc(scores, labels);
  try {
    auto gap = f_gap(scores, labels, subgroups, num_subgroups);
    report.f_gap = gap.gap;
    report.subgroup_auc = std::move(gap.subgroup_auc);
  } catch (const UndefinedMetricError& e) {
    spdlog::warn("{}", e.what());
    report.subgroup_auc.assign(static_cast<std::size_t>(num_subgroups), std::nullopt);
  }
  auto rank = f_rank(scores, subgroups, num_subgroups);
  report.f_rank = rank.value;
  report.rank_sweep = std::move(rank.sweep);
  return report;
}

void to_json(nlohmann::json& j, const MetricReport& r) {
  auto groups = nlohmann::json::array();
  for (const auto& a : r.subgroup_auc) groups.push_back(a ? nlohmann::json(*a) : nlohmann::json(nullptr));
  j = {
      {"auc", r.auc},
      {"subgroup_auc", std::move(groups)},
      {"f_gap", r.f_gap ? nlohmann::json(*r.f_gap) : nlohmann::json(nullptr)},
      {"f_rank", r.f_rank},
      {"rank_sweep", r.rank_sweep},
  };
}

void from_json(const nlohmann::json& j, MetricReport& r) {
  r.auc = j.at("auc").get<double>();
  r.subgroup_auc.clear();
  for (const auto& a : j.at("subgroup_auc")) {
    r.subgroup_auc.push_back(a.is_null() ? std::nullopt : std::optional<double>(a.get<double>()));
  }
  const auto& gap = j.at("f_gap");
  r.f_gap = gap.is_null() ? std::nullopt : std::optional<double>(gap.get<double>());
  r.f_rank = j.at("f_rank").get<double>();
  r.rank_sweep = j.at("rank_sweep").get<std::vector<double>>();
}

}  // namespace fairod::metrics
