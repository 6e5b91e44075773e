#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairod/dataio/synthetic.hpp"
#include "fairod/dcfod/config.hpp"

namespace fairod::harness {

/// A CSV + schema pair, or a synthetic generator configuration.
struct DataSource {
  std::string name;
  std::filesystem::path schema;
  std::filesystem::path data;
  std::optional<dataio::SyntheticConfig> synthetic;
};

enum class SweepAxis { kNone, kAlpha, kBeta, kClusters };

std::string to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(const std::string& name);

struct ExperimentConfig {
  std::string name = "experiment";
  DataSource dataset;
  dcfod::TrainConfig train;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path output_dir;
  SweepAxis sweep_axis = SweepAxis::kNone;
  std::vector<double> sweep_values;
  bool save_scores = true;
  bool save_checkpoints = false;
  int jobs = 1;

  void validate() const;
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "FAIROD_OUTPUT_DIR";
std::filesystem::path default_output_dir();

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

void to_json(nlohmann::json& j, const dataio::SyntheticConfig& c);
void from_json(const nlohmann::json& j, dataio::SyntheticConfig& c);

/// Reads a JSON experiment config; relative dataset paths resolve against the file's directory.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace fairod::harness

namespace fairod::dataio {

void to_json(nlohmann::json& j, const SyntheticConfig& c);
void from_json(const nlohmann::json& j, SyntheticConfig& c);

}  // namespace fairod::dataio
