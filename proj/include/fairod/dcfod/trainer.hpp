#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fairod/dataio/dataset.hpp"
#include "fairod/dcfod/model.hpp"
#include "fairod/numcore/optimizer.hpp"
#include "fairod/numcore/random.hpp"

namespace fairod::dcfod {

/// Per-minibatch quantities computed before any gradient (all treated as constants).
struct BatchState {
  Matrix p;                          // soft assignments, B x K
  Matrix q;                          // auxiliary targets, B x K
  std::vector<Index> memberships;    // nearest centroid per row
  Vector scores;                     // o_i, batch-scope denominators
  Vector weights;                    // w_i
};

struct LossValues {
  double reconstruction = 0.0;  // L_s
  double adversarial = 0.0;     // L_f
  double clustering = 0.0;      // L_r

  /// alpha * L_s + L_r - beta * L_f
  double extractor_objective(double alpha, double beta) const {
    return alpha * reconstruction + clustering - beta * adversarial;
  }
};

/// Coefficients of the extractor objective. `cluster` is 1 in training; gradient checks use it
/// (with alpha and beta) to isolate single terms.
struct ObjectiveWeights {
  double alpha = 8.0;
  double cluster = 1.0;
  double beta = 100.0;
};

/// Optional overrides for the stop-gradient constants of a batch.
struct FrozenTargets {
  Vector weights;
  Matrix q;
};

template <typename Scalar>
struct BatchGradients {
  BatchState state;
  LossValues losses;
  numcore::MlpGradients<Scalar> encoder;        // of the extractor objective
  numcore::MlpGradients<Scalar> decoder;        // of the extractor objective
  Matrix centroids;                             // of the extractor objective
  std::optional<numcore::MlpGradients<Scalar>> discriminator;  // of L_f
};

/// One forward/backward pass over a batch. Computes P, Q, o, w (or takes w, Q from `frozen`),
/// the three losses, the discriminator gradient of L_f and the extractor gradient of
/// alpha*L_s + cluster*L_r - beta*L_f. Parameters are not modified.
template <typename Scalar>
BatchGradients<Scalar> compute_batch_gradients(BasicDcfodModel<Scalar>& model, const Matrix& x,
                                               std::span<const int> groups, const TrainConfig& config,
                                               const ObjectiveWeights& objective, bool training,
                                               numcore::Rng* dropout_rng, const FrozenTargets* frozen = nullptr);

/// As compute_batch_gradients, reusing the buffers already held by `out`.
template <typename Scalar>
void compute_batch_gradients_into(BatchGradients<Scalar>& out, BasicDcfodModel<Scalar>& model, const Matrix& x,
                                  std::span<const int> groups, const TrainConfig& config,
                                  const ObjectiveWeights& objective, bool training, numcore::Rng* dropout_rng,
                                  const FrozenTargets* frozen = nullptr);

/// The same pass without gradients, for oracles and diagnostics.
template <typename Scalar>
LossValues evaluate_losses(BasicDcfodModel<Scalar>& model, const Matrix& x, std::span<const int> groups,
                           const TrainConfig& config, const FrozenTargets* frozen = nullptr);

struct StepReport {
  int epoch = 0;
  int step = 0;
  std::span<const Index> rows;  // dataset rows in this batch
  const BatchState* state = nullptr;
  LossValues losses;
};

using StepObserver = std::function<void(const StepReport&)>;

/// Owns the optimizer state for one model and applies min-max steps.
template <typename Scalar>
class BasicTrainer {
 public:
  BasicTrainer(BasicDcfodModel<Scalar>& model, TrainConfig config);

  /// One min-max step: discriminator descends L_f, then (f, h, mu) descend
  /// alpha*L_s + L_r - beta*L_f, both from gradients at the step-start parameters.
  /// Throws TrainingError when a loss or gradient is non-finite.
  /// The returned gradients live in a buffer that the next step overwrites.
  const BatchGradients<Scalar>& step(const Matrix& x, std::span<const int> groups, double lr_scale);

  const TrainConfig& config() const { return config_; }
  numcore::Rng& dropout_rng() { return dropout_rng_; }

 private:
  BasicDcfodModel<Scalar>& model_;
  TrainConfig config_;
  numcore::BasicBlockOptimizer<Scalar> nets_opt_;
  numcore::BlockOptimizer centroid_opt_;
  numcore::BasicBlockOptimizer<Scalar> discriminator_opt_;
  numcore::Rng dropout_rng_;
  BatchGradients<Scalar> workspace_;
};

using Trainer = BasicTrainer<float>;

extern template class BasicTrainer<float>;
extern template class BasicTrainer<double>;

struct EpochSummary {
  int epoch = 0;
  double lr_scale = 1.0;
  LossValues mean_losses;  // averaged over the epoch's batches
};

struct FitResult {
  DcfodModel model;
  Vector scores;       // full-data scores, dropout off
  Matrix embeddings;   // final dropout-free embeddings of every row
  std::vector<EpochSummary> history;
  TrainConfig config;  // with epochs and batch size resolved
};

/// Xavier init, embed, k-means centroids, epochs x batches of min-max steps with the step-wise
/// learning-rate schedule, then a full-data scoring pass.
FitResult fit(const dataio::FeatureTable& data, const TrainConfig& config,
              const StepObserver& observer = {});

/// Builds the batch state (P, Q, memberships, o, w) for embeddings `z`.
BatchState make_batch_state(const Matrix& z, const Matrix& centroids, bool use_weights);

}  // namespace fairod::dcfod
