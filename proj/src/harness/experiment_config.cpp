#include "fairod/harness/experiment_config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "fairod/errors.hpp"

namespace fairod::dataio {

void to_json(nlohmann::json& j, const SyntheticConfig& c) {
  j = {{"clusters", c.clusters},         {"n", c.n},
       {"dims", c.dims},                 {"outlier_rate", c.outlier_rate},
       {"subgroup_bias", c.subgroup_bias}, {"seed", c.seed},
       {"cluster_std", c.cluster_std},   {"center_range", c.center_range},
       {"outlier_range", c.outlier_range}, {"proxy_shift", c.proxy_shift}};
}

void from_json(const nlohmann::json& j, SyntheticConfig& c) {
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("clusters", c.clusters);
  get("n", c.n);
  get("dims", c.dims);
  get("outlier_rate", c.outlier_rate);
  get("subgroup_bias", c.subgroup_bias);
  get("seed", c.seed);
  get("cluster_std", c.cluster_std);
  get("center_range", c.center_range);
  get("outlier_range", c.outlier_range);
  get("proxy_shift", c.proxy_shift);
}

}  // namespace fairod::dataio

namespace fairod::harness {

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kNone: return "none";
    case SweepAxis::kAlpha: return "alpha";
    case SweepAxis::kBeta: return "beta";
    case SweepAxis::kClusters: return "K";
  }
  return "none";
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "none" || name.empty()) return SweepAxis::kNone;
  if (name == "alpha") return SweepAxis::kAlpha;
  if (name == "beta") return SweepAxis::kBeta;
  if (name == "K" || name == "k" || name == "clusters") return SweepAxis::kClusters;
  throw ArgumentError("unknown sweep axis '" + name + "' (expected none, alpha, beta or K)");
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ArgumentError("experiment: seed list is empty");
  if (sweep_axis != SweepAxis::kNone && sweep_values.empty()) {
    throw ArgumentError("experiment: sweep axis '" + to_string(sweep_axis) + "' has no values");
  }
  if (!dataset.synthetic && (dataset.schema.empty() || dataset.data.empty())) {
    throw ArgumentError("experiment: dataset needs a schema and data path, or a synthetic block");
  }
  if (jobs < 1) throw ArgumentError("experiment: jobs must be at least 1");
  std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size()) throw ArgumentError("experiment: duplicate seeds");
  train.validate();
}

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
  return "runs";
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  nlohmann::json dataset = {{"name", c.dataset.name}};
  if (c.dataset.synthetic) {
    dataset["synthetic"] = *c.dataset.synthetic;
  } else {
    dataset["schema"] = c.dataset.schema.generic_string();
    dataset["data"] = c.dataset.data.generic_string();
  }
  j = {
      {"name", c.name},
      {"dataset", dataset},
      {"train", c.train},
      {"seeds", c.seeds},
      {"output_dir", c.output_dir.generic_string()},
      {"sweep", {{"axis", to_string(c.sweep_axis)}, {"values", c.sweep_values}}},
      {"save_scores", c.save_scores},
      {"save_checkpoints", c.save_checkpoints},
      {"jobs", c.jobs},
  };
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  try {
    c.name = j.value("name", c.name);
    if (j.contains("dataset")) {
      const auto& d = j.at("dataset");
      c.dataset.name = d.value("name", std::string());
      if (d.contains("synthetic")) {
        c.dataset.synthetic = d.at("synthetic").get<dataio::SyntheticConfig>();
        if (c.dataset.name.empty()) c.dataset.name = "synthetic";
      } else {
        c.dataset.schema = d.at("schema").get<std::string>();
        c.dataset.data = d.at("data").get<std::string>();
        if (c.dataset.name.empty()) c.dataset.name = c.dataset.data.stem().string();
      }
    }
    if (j.contains("train")) {
      c.train = dcfod::TrainConfig{};
      j.at("train").get_to(c.train);
    }
    if (j.contains("seeds")) {
      c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    } else if (j.contains("num_seeds")) {
      c.seeds.clear();
      const auto n = j.at("num_seeds").get<std::uint64_t>();
      for (std::uint64_t s = 0; s < n; ++s) c.seeds.push_back(s);
    }
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      c.sweep_axis = parse_sweep_axis(s.value("axis", std::string("none")));
      c.sweep_values = s.value("values", std::vector<double>{});
    }
    c.save_scores = j.value("save_scores", c.save_scores);
    c.save_checkpoints = j.value("save_checkpoints", c.save_checkpoints);
    c.jobs = j.value("jobs", c.jobs);
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("experiment config: ") + e.what());
  }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open config '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError("config '" + path.string() + "': " + e.what());
  }
  auto config = j.get<ExperimentConfig>();
  const auto base = path.parent_path();
  if (!config.dataset.synthetic) {
    if (config.dataset.schema.is_relative()) config.dataset.schema = base / config.dataset.schema;
    if (config.dataset.data.is_relative()) config.dataset.data = base / config.dataset.data;
  }
  return config;
}

}  // namespace fairod::harness
