// fairod: command-line front end for training, benchmarking and evaluating fair outlier detectors.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "fairod/dataio/synthetic.hpp"
#include "fairod/dcfod/gradcheck.hpp"
#include "fairod/errors.hpp"
#include "fairod/harness/experiment.hpp"
#include "fairod/harness/report.hpp"
#include "fairod/metrics/fairness.hpp"

namespace {

using namespace fairod;

// Flags that override values from --config.
struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string mode;
  std::string out;
  std::string name;
  std::string data;
  std::string schema;
  std::optional<double> alpha, beta, lr, centroid_lr;
  std::optional<int> clusters, epochs, batch_size, jobs;
  std::string optimizer;
  bool checkpoints = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config,-c", o.config, "experiment config (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--mode", o.mode, "full | dcod | no_weights");
  cmd->add_option("--out,-o", o.out, "output directory");
  cmd->add_option("--name", o.name, "run name (subdirectory of the output directory)");
  cmd->add_option("--data", o.data, "CSV data file")->check(CLI::ExistingFile);
  cmd->add_option("--schema", o.schema, "schema file for --data")->check(CLI::ExistingFile);
  cmd->add_option("--alpha", o.alpha, "reconstruction weight");
  cmd->add_option("--beta", o.beta, "adversarial weight");
  cmd->add_option("--clusters,-K", o.clusters, "number of clusters");
  cmd->add_option("--epochs", o.epochs, "training epochs (0 = size-dependent default)");
  cmd->add_option("--batch-size", o.batch_size, "minibatch size (0 = size-dependent default)");
  cmd->add_option("--lr", o.lr, "network learning rate");
  cmd->add_option("--centroid-lr", o.centroid_lr, "centroid learning rate");
  cmd->add_option("--optimizer", o.optimizer, "sgd | adam");
  cmd->add_option("--jobs,-j", o.jobs, "seeds trained concurrently");
  cmd->add_flag("--checkpoints", o.checkpoints, "write a model checkpoint per seed");
}

harness::ExperimentConfig resolve(const Overrides& o) {
  harness::ExperimentConfig c;
  if (!o.config.empty()) c = harness::load_experiment_config(o.config);
  if (!o.data.empty() || !o.schema.empty()) {
    if (o.data.empty() || o.schema.empty()) throw ArgumentError("--data and --schema go together");
    c.dataset = harness::DataSource{};
    c.dataset.data = o.data;
    c.dataset.schema = o.schema;
    c.dataset.name = c.dataset.data.stem().string();
  }
  if (o.seed) c.seeds = {*o.seed};
  if (!o.mode.empty()) c.train.mode = dcfod::parse_mode(o.mode);
  if (!o.out.empty()) c.output_dir = o.out;
  if (c.output_dir.empty()) c.output_dir = harness::default_output_dir();
  if (!o.name.empty()) c.name = o.name;
  if (o.alpha) c.train.alpha = *o.alpha;
  if (o.beta) c.train.beta = *o.beta;
  if (o.clusters) c.train.clusters = *o.clusters;
  if (o.epochs) c.train.epochs = *o.epochs;
  if (o.batch_size) c.train.batch_size = *o.batch_size;
  if (o.lr) c.train.learning_rate = *o.lr;
  if (o.centroid_lr) c.train.centroid_learning_rate = *o.centroid_lr;
  if (!o.optimizer.empty()) c.train.optimizer = numcore::parse_optimizer(o.optimizer);
  if (o.jobs) c.jobs = *o.jobs;
  if (o.checkpoints) c.save_checkpoints = true;
  return c;
}

int report_runs(const std::vector<harness::RunRecord>& runs) {
  std::cout << harness::format_table(runs);
  for (const auto& r : runs) {
    for (const auto& s : r.seeds) {
      if (!s.ok) std::cerr << "seed " << s.seed << " failed: " << s.error << "\n";
    }
  }
  for (const auto& r : runs) {
    if (r.failed() > 0) return 1;
  }
  return 0;
}

int cmd_train(const Overrides& o) {
  auto c = resolve(o);
  if (c.seeds.size() > 1) c.seeds.resize(1);
  return report_runs({harness::run_experiment(c)});
}

int cmd_bench(const Overrides& o, std::optional<int> num_seeds) {
  auto c = resolve(o);
  if (num_seeds) {
    if (*num_seeds < 1) throw ArgumentError("--seeds must be at least 1");
    const std::uint64_t base = o.seed.value_or(0);
    c.seeds.clear();
    for (int s = 0; s < *num_seeds; ++s) c.seeds.push_back(base + static_cast<std::uint64_t>(s));
  }
  return report_runs({harness::run_experiment(c)});
}

int cmd_sweep(const Overrides& o, const std::string& axis, const std::vector<double>& values,
              std::optional<int> num_seeds) {
  auto c = resolve(o);
  if (!axis.empty()) c.sweep_axis = harness::parse_sweep_axis(axis);
  if (!values.empty()) c.sweep_values = values;
  if (num_seeds) {
    const std::uint64_t base = o.seed.value_or(0);
    c.seeds.clear();
    for (int s = 0; s < *num_seeds; ++s) c.seeds.push_back(base + static_cast<std::uint64_t>(s));
  }
  const auto result = harness::run_sweep(c);
  std::vector<harness::RunRecord> runs = result.runs;
  return report_runs(runs);
}

struct SynthOptions {
  dataio::SyntheticConfig config;
  std::string out = ".";
  std::string stem = "synthetic";
};

int cmd_synth(const SynthOptions& s) {
  const auto data = dataio::make_synthetic(s.config);
  const auto csv = dataio::write_synthetic(data, s.out, s.stem);
  std::cout << csv.string() << "\n" << (csv.parent_path() / (s.stem + ".schema.json")).string() << "\n";
  return 0;
}

int cmd_eval(const std::string& scores_path, const std::string& data_path, const std::string& schema_path) {
  const auto scores = harness::read_scores(scores_path);
  const auto data = dataio::load_csv(data_path, dataio::load_schema(schema_path));
  if (!data.labels) throw ArgumentError("eval: the schema declares no label column");
  if (static_cast<numcore::Index>(scores.size()) != data.table.size()) {
    throw DimensionError("eval: " + std::to_string(scores.size()) + " scores for " +
                         std::to_string(data.table.size()) + " rows");
  }
  const auto m = metrics::evaluate(scores, *data.labels, data.table.subgroups, data.table.num_subgroups());
  std::printf("AUC     %.6f\n", m.auc);
  for (std::size_t g = 0; g < m.subgroup_auc.size(); ++g) {
    const auto& name = data.table.subgroup_names[g];
    if (m.subgroup_auc[g]) {
      std::printf("  AUC[%s]  %.6f\n", name.c_str(), *m.subgroup_auc[g]);
    } else {
      std::printf("  AUC[%s]  n/a\n", name.c_str());
    }
  }
  if (m.f_gap) {
    std::printf("F_Gap   %.6f\n", *m.f_gap);
  } else {
    std::printf("F_Gap   n/a\n");
  }
  std::printf("F_Rank  %.6f\n", m.f_rank);
  return 0;
}

int cmd_gradcheck(std::uint64_t seed) {
  const auto checks = dcfod::run_objective_gradcheck(seed);
  bool ok = true;
  for (const auto& c : checks) {
    std::printf("%-22s params %3zu  max rel err %.3e  %s\n", c.term.c_str(), c.parameters,
                c.report.max_relative_error, c.report.passed ? "ok" : "FAIL");
    ok = ok && c.report.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep clustering outlier detection with subgroup fairness"};
  app.require_subcommand(1);
  app.fallthrough();
  bool quiet = false, verbose = false;
  app.add_flag("--quiet,-q", quiet, "only warnings and errors");
  app.add_flag("--verbose,-v", verbose, "per-epoch training losses");

  Overrides train_o, bench_o, sweep_o;
  auto* train = app.add_subcommand("train", "fit one seed and score the data");
  add_common(train, train_o);

  auto* bench = app.add_subcommand("bench", "multi-seed run with mean and standard deviation per metric");
  add_common(bench, bench_o);
  std::optional<int> bench_seeds;
  bench->add_option("--seeds", bench_seeds, "number of seeds (consecutive, starting at --seed or 0)");

  auto* sweep = app.add_subcommand("sweep", "one multi-seed run per value of a hyperparameter");
  add_common(sweep, sweep_o);
  std::string axis;
  std::vector<double> values;
  std::optional<int> sweep_seeds;
  sweep->add_option("--axis", axis, "alpha | beta | K");
  sweep->add_option("--values", values, "grid values")->delimiter(',');
  sweep->add_option("--seeds", sweep_seeds, "number of seeds per grid value");

  SynthOptions synth_o;
  auto* synth = app.add_subcommand("synth", "generate a labelled synthetic dataset");
  synth->add_option("--n", synth_o.config.n, "rows");
  synth->add_option("--rate", synth_o.config.outlier_rate, "outlier fraction");
  synth->add_option("--bias", synth_o.config.subgroup_bias, "extra probability that an outlier is in group 1");
  synth->add_option("--seed", synth_o.config.seed, "random seed");
  synth->add_option("--dims", synth_o.config.dims, "features");
  synth->add_option("--clusters", synth_o.config.clusters, "inlier blobs");
  synth->add_option("--proxy-shift", synth_o.config.proxy_shift, "subgroup offset of the last feature (in sd)");
  synth->add_option("--out,-o", synth_o.out, "output directory");
  synth->add_option("--name", synth_o.stem, "file stem");

  std::string scores_path, data_path, schema_path;
  auto* eval = app.add_subcommand("eval", "metrics for an existing score dump");
  eval->add_option("--scores", scores_path, "score dump")->required()->check(CLI::ExistingFile);
  eval->add_option("--data", data_path, "labelled CSV")->required()->check(CLI::ExistingFile);
  eval->add_option("--schema", schema_path, "schema with a label rule")->required()->check(CLI::ExistingFile);

  std::uint64_t gc_seed = 0;
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of the training gradients");
  gradcheck->add_option("--seed", gc_seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  spdlog::set_level(quiet ? spdlog::level::warn : verbose ? spdlog::level::debug : spdlog::level::info);
  spdlog::set_pattern("[%H:%M:%S] [%^%l%$] %v");

  try {
    if (*train) return cmd_train(train_o);
    if (*bench) return cmd_bench(bench_o, bench_seeds);
    if (*sweep) return cmd_sweep(sweep_o, axis, values, sweep_seeds);
    if (*synth) return cmd_synth(synth_o);
    if (*eval) return cmd_eval(scores_path, data_path, schema_path);
    if (*gradcheck) return cmd_gradcheck(gc_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
