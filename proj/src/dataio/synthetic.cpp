#include "fairod/dataio/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "fairod/dataio/csv.hpp"
#include "fairod/errors.hpp"
#include "fairod/numcore/random.hpp"

namespace fairod::dataio {

void SyntheticConfig::validate() const {
  if (!(outlier_rate > 0.0 && outlier_rate < 0.5)) {
    throw ArgumentError("synthetic: outlier rate must lie in (0, 0.5)");
  }
  if (!(subgroup_bias >= -0.5 && subgroup_bias <= 0.5)) {
    throw ArgumentError("synthetic: subgroup bias must lie in [-0.5, 0.5]");
  }
  if (clusters < 1 || n < 2 || dims < 1) throw ArgumentError("synthetic: sizes must be positive");
  if (cluster_std <= 0.0 || center_range <= 0.0 || outlier_range <= 0.0) {
    throw ArgumentError("synthetic: scales must be positive");
  }
}

SyntheticData make_synthetic(const SyntheticConfig& config) {
  config.validate();
  auto rng = numcore::make_stream(config.seed, /*stream=*/0x5e1);

  const auto n_out = static_cast<Index>(std::llround(config.outlier_rate * static_cast<double>(config.n)));
  if (n_out < 1 || n_out >= config.n) throw ArgumentError("synthetic: outlier count out of range");

  Matrix centers(config.clusters, config.dims);
  for (Index i = 0; i < centers.size(); ++i) {
    centers.data()[i] = numcore::uniform(rng, -config.center_range, config.center_range);
  }

  // Outliers occupy a random subset of row positions.
  std::vector<Index> order(static_cast<std::size_t>(config.n));
  std::iota(order.begin(), order.end(), Index{0});
  numcore::shuffle(order, rng);
  std::vector<int> labels(static_cast<std::size_t>(config.n), 0);
  for (Index i = 0; i < n_out; ++i) labels[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = 1;

  SyntheticData out;
  out.raw.resize(config.n, config.dims);
  std::vector<int> groups(static_cast<std::size_t>(config.n));
  for (Index i = 0; i < config.n; ++i) {
    const bool outlier = labels[static_cast<std::size_t>(i)] == 1;
    if (outlier) {
      for (Index d = 0; d < config.dims; ++d) {
        out.raw(i, d) = numcore::uniform(rng, -config.outlier_range, config.outlier_range);
      }
    } else {
      const auto k = static_cast<Index>(numcore::uniform_index(rng, static_cast<std::uint64_t>(config.clusters)));
      for (Index d = 0; d < config.dims; ++d) {
        out.raw(i, d) = centers(k, d) + config.cluster_std * numcore::standard_normal(rng);
      }
    }
    const double p_one = outlier ? 0.5 + config.subgroup_bias : 0.5;
    const int g = numcore::uniform01(rng) < p_one ? 1 : 0;
    groups[static_cast<std::size_t>(i)] = g;
    out.raw(i, config.dims - 1) += (g == 1 ? 1.0 : -1.0) * config.proxy_shift * config.cluster_std;
  }

  FeatureTable& t = out.dataset.table;
  t.features = out.raw;
  std::vector<Index> all(static_cast<std::size_t>(config.dims));
  std::iota(all.begin(), all.end(), Index{0});
  standardize_columns(t.features, all);
  t.subgroups = std::move(groups);
  t.subgroup_names = {"g0", "g1"};
  for (Index d = 0; d < config.dims; ++d) t.feature_names.push_back("x" + std::to_string(d));
  out.dataset.labels = std::move(labels);
  t.validate();
  return out;
}

std::filesystem::path write_synthetic(const SyntheticData& data, const std::filesystem::path& dir,
                                      const std::string& stem) {
  std::filesystem::create_directories(dir);
  const auto csv_path = dir / (stem + ".csv");
  std::ofstream out(csv_path);
  if (!out) throw LoadError("cannot write '" + csv_path.string() + "'");
  const auto& t = data.dataset.table;
  std::vector<std::string> header = t.feature_names;
  header.emplace_back("group");
  header.emplace_back("outlier");
  write_csv_row(out, header);
  char buf[40];
  for (Index i = 0; i < data.raw.rows(); ++i) {
    std::vector<std::string> fields;
    for (Index d = 0; d < data.raw.cols(); ++d) {
      std::snprintf(buf, sizeof buf, "%.17g", data.raw(i, d));
      fields.emplace_back(buf);
    }
    fields.push_back(t.subgroup_names[static_cast<std::size_t>(t.subgroups[static_cast<std::size_t>(i)])]);
    fields.push_back(std::to_string((*data.dataset.labels)[static_cast<std::size_t>(i)]));
    write_csv_row(out, fields);
  }

  DatasetSchema schema;
  for (const auto& name : t.feature_names) schema.features.push_back({name, ColumnKind::kNumeric});
  schema.sensitive = "group";
  schema.label = LabelPredicate{"outlier", "==", "1"};
  save_schema(schema, dir / (stem + ".schema.json"));
  return csv_path;
}

}  // namespace fairod::dataio
