#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairod/dataio/dataset.hpp"
#include "fairod/harness/experiment_config.hpp"
#include "fairod/metrics/fairness.hpp"

namespace fairod::harness {

struct SeedRecord {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::optional<metrics::MetricReport> metrics;  // absent when the data has no labels
  std::string scores_file;                       // relative to the run directory, or empty
  std::string checkpoint_file;
  double wall_seconds = 0.0;                     // reported separately from the results document

  bool operator==(const SeedRecord&) const = default;
};

/// mean and population standard deviation over the seeds where the metric is defined.
struct Aggregate {
  double mean = 0.0;
  double stdev = 0.0;
  int count = 0;

  bool operator==(const Aggregate&) const = default;
};

Aggregate aggregate(const std::vector<double>& values);

struct RunRecord {
  nlohmann::json config;  // effective configuration echo
  std::string dataset;
  std::string mode;
  std::string label;      // sweep point, e.g. "beta=100"; empty for a plain run
  std::string note;       // e.g. "w/o adversarial training"
  std::vector<SeedRecord> seeds;
  std::optional<Aggregate> auc;
  std::optional<Aggregate> f_gap;
  std::optional<Aggregate> f_rank;

  int failed() const;
  bool operator==(const RunRecord&) const = default;
};

/// Dataset named by the experiment (CSV + schema, or generated).
dataio::Dataset load_dataset(const DataSource& source);

/// Fits, scores and evaluates every seed, writing score dumps and checkpoints under `run_dir`.
/// A seed that throws is recorded as failed with its message.
RunRecord run_experiment(const ExperimentConfig& config, const dataio::Dataset& data,
                         const std::filesystem::path& run_dir);

/// Loads the data and runs into `config.output_dir / config.name`.
RunRecord run_experiment(const ExperimentConfig& config);

struct SweepResult {
  std::vector<RunRecord> runs;
  std::string table;
};

/// One run per grid value of the sweep axis (a single pass-through run when the axis is none).
SweepResult run_sweep(const ExperimentConfig& config);

}  // namespace fairod::harness
