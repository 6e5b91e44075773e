#include "fairod/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

#include <spdlog/spdlog.h>

#include "fairod/dcfod/checkpoint.hpp"
#include "fairod/dcfod/trainer.hpp"
#include "fairod/errors.hpp"
#include "fairod/harness/report.hpp"

namespace fairod::harness {

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  a.count = static_cast<int>(values.size());
  if (values.empty()) return a;
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - a.mean) * (v - a.mean);
  a.stdev = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size())) : 0.0;
  return a;
}

int RunRecord::failed() const {
  int n = 0;
  for (const auto& s : seeds) n += s.ok ? 0 : 1;
  return n;
}

dataio::Dataset load_dataset(const DataSource& source) {
  if (source.synthetic) return dataio::make_synthetic(*source.synthetic).dataset;
  return dataio::load_csv(source.data, dataio::load_schema(source.schema));
}

namespace {

SeedRecord run_seed(const ExperimentConfig& config, const dataio::Dataset& data,
                    const std::filesystem::path& run_dir, std::uint64_t seed) {
  SeedRecord record;
  record.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    dcfod::TrainConfig train = config.train;
    train.seed = seed;
    auto fitted = dcfod::fit(data.table, train);
    const std::vector<double> scores(fitted.scores.data(), fitted.scores.data() + fitted.scores.size());
    if (config.save_scores) {
      record.scores_file = "scores_seed" + std::to_string(seed) + ".csv";
      write_scores(run_dir / record.scores_file, scores);
    }
    if (config.save_checkpoints) {
      record.checkpoint_file = "checkpoint_seed" + std::to_string(seed) + ".bin";
      dcfod::save_checkpoint(fitted.model, fitted.config, run_dir / record.checkpoint_file);
    }
    if (data.labels) {
      record.metrics = metrics::evaluate(scores, *data.labels, data.table.subgroups, data.table.num_subgroups());
    }
    record.ok = true;
  } catch (const std::exception& e) {
    record.ok = false;
    record.error = e.what();
    spdlog::error("seed {} failed: {}", seed, e.what());
  }
  record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

}  // namespace

RunRecord run_experiment(const ExperimentConfig& config, const dataio::Dataset& data,
                         const std::filesystem::path& run_dir) {
  config.validate();
  std::filesystem::create_directories(run_dir);

  RunRecord run;
  run.config = config;
  run.dataset = config.dataset.name;
  run.mode = dcfod::to_string(config.train.mode);
  run.seeds.resize(config.seeds.size());

  // Each worker owns one seed at a time. Records are sorted by seed afterwards, so the report
  // does not depend on scheduling.
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < config.seeds.size(); i = next++) {
      spdlog::info("{}: seed {} ({}/{})", config.name, config.seeds[i], i + 1, config.seeds.size());
      run.seeds[i] = run_seed(config, data, run_dir, config.seeds[i]);
    }
  };
  const auto jobs = std::min<std::size_t>(static_cast<std::size_t>(config.jobs), config.seeds.size());
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  std::sort(run.seeds.begin(), run.seeds.end(),
            [](const SeedRecord& a, const SeedRecord& b) { return a.seed < b.seed; });

  std::vector<double> auc, gap, rank;
  for (const auto& s : run.seeds) {
    if (!s.ok || !s.metrics) continue;
    auc.push_back(s.metrics->auc);
    if (s.metrics->f_gap) gap.push_back(*s.metrics->f_gap);
    rank.push_back(s.metrics->f_rank);
  }
  if (!auc.empty()) run.auc = aggregate(auc);
  if (!gap.empty()) run.f_gap = aggregate(gap);
  if (!rank.empty()) run.f_rank = aggregate(rank);
  return run;
}

RunRecord run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto data = load_dataset(config.dataset);
  const auto dir = (config.output_dir.empty() ? default_output_dir() : config.output_dir) / config.name;
  auto run = run_experiment(config, data, dir);
  emit_report({run}, dir);
  return run;
}

namespace {

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  SweepResult result;
  const auto data = load_dataset(config.dataset);
  const auto root = (config.output_dir.empty() ? default_output_dir() : config.output_dir) / config.name;
  if (config.sweep_axis == SweepAxis::kNone) {
    result.runs.push_back(run_experiment(config, data, root));
  } else {
    for (double value : config.sweep_values) {
      ExperimentConfig point = config;
      point.sweep_axis = SweepAxis::kNone;
      point.sweep_values.clear();
      std::string note;
      switch (config.sweep_axis) {
        case SweepAxis::kAlpha: point.train.alpha = value; break;
        case SweepAxis::kBeta:
          point.train.beta = value;
          if (value == 0.0) note = "w/o adversarial training";
          break;
        case SweepAxis::kClusters:
          if (value < 2 || value != std::floor(value)) throw ArgumentError("sweep: K values must be integers >= 2");
          point.train.clusters = static_cast<numcore::Index>(value);
          break;
        case SweepAxis::kNone: break;
      }
      const std::string label = to_string(config.sweep_axis) + "=" + format_value(value);
      auto run = run_experiment(point, data, root / label);
      run.label = label;
      run.note = note;
      emit_report({run}, root / label);
      result.runs.push_back(std::move(run));
    }
  }
  emit_report(result.runs, root);
  result.table = format_table(result.runs);
  return result;
}

}  // namespace fairod::harness
