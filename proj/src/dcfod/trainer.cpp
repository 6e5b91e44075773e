#include "fairod/dcfod/trainer.hpp"

#include <cmath>
#include <sstream>

#include <spdlog/spdlog.h>

#include "fairod/clusterinit/kmeans.hpp"
#include "fairod/dataio/batches.hpp"
#include "fairod/dcfod/assignment.hpp"
#include "fairod/dcfod/losses.hpp"
#include "fairod/errors.hpp"

namespace fairod::dcfod {

namespace {

constexpr std::uint64_t kDropoutStream = 4;
constexpr std::uint64_t kKMeansStream = 6;

template <typename Scalar>
std::vector<std::span<Scalar>> extractor_params(BasicDcfodModel<Scalar>& model) {
  auto blocks = model.encoder.parameter_blocks();
  auto dec = model.decoder.parameter_blocks();
  blocks.insert(blocks.end(), dec.begin(), dec.end());
  return blocks;
}

template <typename Scalar>
std::vector<std::span<const Scalar>> extractor_grads(const BatchGradients<Scalar>& g) {
  auto blocks = numcore::Mlp<Scalar>::gradient_blocks(g.encoder);
  auto dec = numcore::Mlp<Scalar>::gradient_blocks(g.decoder);
  blocks.insert(blocks.end(), dec.begin(), dec.end());
  return blocks;
}

bool finite(const LossValues& l) {
  return std::isfinite(l.reconstruction) && std::isfinite(l.adversarial) && std::isfinite(l.clustering);
}

}  // namespace

BatchState make_batch_state(const Matrix& z, const Matrix& centroids, bool use_weights) {
  BatchState state;
  const Matrix sq = numcore::pairwise_sq_distances(z, centroids);
  state.p = soft_assign_from_sq(sq);
  state.q = auxiliary_target(state.p);
  state.memberships = nearest_memberships(sq);
  state.scores = outlier_scores_from_sq(sq, state.memberships);
  if (use_weights) {
    state.weights = dynamic_weights(state.scores);
  } else {
    state.weights = Vector::Constant(z.rows(), 1.0 / static_cast<double>(z.rows()));
  }
  return state;
}

template <typename Scalar>
BatchGradients<Scalar> compute_batch_gradients(BasicDcfodModel<Scalar>& model, const Matrix& x,
                                               std::span<const int> groups, const TrainConfig& config,
                                               const ObjectiveWeights& objective, bool training,
                                               numcore::Rng* dropout_rng, const FrozenTargets* frozen) {
  BatchGradients<Scalar> out;
  compute_batch_gradients_into(out, model, x, groups, config, objective, training, dropout_rng, frozen);
  return out;
}

template <typename Scalar>
void compute_batch_gradients_into(BatchGradients<Scalar>& out, BasicDcfodModel<Scalar>& model, const Matrix& x,
                                  std::span<const int> groups, const TrainConfig& config,
                                  const ObjectiveWeights& objective, bool training, numcore::Rng* dropout_rng,
                                  const FrozenTargets* frozen) {
  using NetMatrix = numcore::MatrixX<Scalar>;
  if (static_cast<Index>(groups.size()) != x.rows()) {
    throw DimensionError("batch: " + std::to_string(groups.size()) + " subgroup labels for " +
                         std::to_string(x.rows()) + " rows");
  }
  out.losses = LossValues{};
  // Networks run in Scalar; everything between them is double.
  const NetMatrix zs = model.encoder.forward(x.template cast<Scalar>(), training, dropout_rng);
  const Matrix z = zs.template cast<double>();
  out.state = make_batch_state(z, model.centroids, config.uses_weights());
  if (frozen != nullptr) {
    out.state.weights = frozen->weights;
    out.state.q = frozen->q;
  }
  const Vector& w = out.state.weights;

  const Matrix xhat = model.decoder.forward(zs, training).template cast<double>();
  auto rec = reconstruction_loss(x, xhat, w);
  auto clu = clustering_loss(z, model.centroids, out.state.q, w);
  out.losses.reconstruction = rec.value;
  out.losses.clustering = clu.value;

  model.decoder.backward((objective.alpha * rec.grad).template cast<Scalar>(), out.decoder);
  Matrix grad_z = out.decoder.input.template cast<double>() + objective.cluster * clu.grad_z;
  if (model.discriminator) {
    const Matrix logits = model.discriminator->forward(zs, training).template cast<double>();
    auto adv = adversarial_loss(logits, groups, w);
    out.losses.adversarial = adv.value;
    if (!out.discriminator) out.discriminator.emplace();
    model.discriminator->backward(adv.grad.template cast<Scalar>(), *out.discriminator);
    if (objective.beta != 0.0) grad_z -= objective.beta * out.discriminator->input.template cast<double>();
  }
  if (!model.discriminator) out.discriminator.reset();
  model.encoder.backward(grad_z.template cast<Scalar>(), out.encoder);
  out.centroids = objective.cluster * clu.grad_mu;
}

template <typename Scalar>
LossValues evaluate_losses(BasicDcfodModel<Scalar>& model, const Matrix& x, std::span<const int> groups,
                           const TrainConfig& config, const FrozenTargets* frozen) {
  const ObjectiveWeights objective{config.alpha, 1.0, config.effective_beta()};
  return compute_batch_gradients(model, x, groups, config, objective, false, nullptr, frozen).losses;
}

template <typename Scalar>
BasicTrainer<Scalar>::BasicTrainer(BasicDcfodModel<Scalar>& model, TrainConfig config)
    : model_(model),
      config_(std::move(config)),
      nets_opt_(config_.optimizer),
      centroid_opt_(config_.optimizer),
      discriminator_opt_(config_.optimizer),
      dropout_rng_(numcore::make_stream(config_.seed, kDropoutStream)) {
  config_.validate();
}

template <typename Scalar>
const BatchGradients<Scalar>& BasicTrainer<Scalar>::step(const Matrix& x, std::span<const int> groups,
                                                         double lr_scale) {
  const ObjectiveWeights objective{config_.alpha, 1.0, config_.effective_beta()};
  BatchGradients<Scalar>& g = workspace_;
  compute_batch_gradients_into(g, model_, x, groups, config_, objective, true, &dropout_rng_);

  if (!finite(g.losses) || !g.centroids.allFinite() || !g.encoder.input.allFinite()) {
    std::ostringstream msg;
    msg << "non-finite training loss (L_s=" << g.losses.reconstruction << ", L_f=" << g.losses.adversarial
        << ", L_r=" << g.losses.clustering << "); the step diverged, try lowering learning_rate ("
        << config_.learning_rate << ") or centroid_learning_rate (" << config_.centroid_learning_rate
        << "), or reducing beta (" << config_.beta << ")";
    throw TrainingError(msg.str());
  }

  const double lr = config_.learning_rate * lr_scale;
  const double lr_mu = config_.centroid_learning_rate * lr_scale;
  if (model_.discriminator && g.discriminator) {
    discriminator_opt_.step(model_.discriminator->parameter_blocks(),
                            numcore::Mlp<Scalar>::gradient_blocks(*g.discriminator),
                            config_.resolved_discriminator_learning_rate() * lr_scale);
  }
  nets_opt_.step(extractor_params(model_), extractor_grads(g), lr);
  centroid_opt_.step({std::span<double>(model_.centroids.data(), static_cast<std::size_t>(model_.centroids.size()))},
                     {std::span<const double>(g.centroids.data(), static_cast<std::size_t>(g.centroids.size()))},
                     lr_mu);
  return g;
}

#define FAIROD_INSTANTIATE(Scalar)                                                                          \
  template BatchGradients<Scalar> compute_batch_gradients(BasicDcfodModel<Scalar>&, const Matrix&,          \
                                                          std::span<const int>, const TrainConfig&,         \
                                                          const ObjectiveWeights&, bool, numcore::Rng*,     \
                                                          const FrozenTargets*);                            \
  template void compute_batch_gradients_into(BatchGradients<Scalar>&, BasicDcfodModel<Scalar>&, const Matrix&, \
                                             std::span<const int>, const TrainConfig&, const ObjectiveWeights&, \
                                             bool, numcore::Rng*, const FrozenTargets*);                     \
  template LossValues evaluate_losses(BasicDcfodModel<Scalar>&, const Matrix&, std::span<const int>,        \
                                      const TrainConfig&, const FrozenTargets*);                            \
  template class BasicTrainer<Scalar>;

FAIROD_INSTANTIATE(float)
FAIROD_INSTANTIATE(double)
#undef FAIROD_INSTANTIATE

FitResult fit(const dataio::FeatureTable& data, const TrainConfig& config, const StepObserver& observer) {
  config.validate();
  data.validate();
  const Index n = data.size();
  if (n < config.clusters) {
    throw ArgumentError("fit: " + std::to_string(n) + " rows cannot seed " +
                        std::to_string(config.clusters) + " clusters");
  }

  TrainConfig resolved = config;
  resolved.epochs = config.resolved_epochs(n);
  resolved.batch_size = config.resolved_batch_size(n);

  DcfodModel model = DcfodModel::build(data.dims(), data.num_subgroups(), resolved);
  model.initialize(resolved.seed);

  const Matrix initial = model.embed(data.features);
  const std::uint64_t kmeans_seed = numcore::make_stream(resolved.seed, kKMeansStream)();
  model.centroids =
      n > resolved.minibatch_kmeans_threshold
          ? clusterinit::minibatch_kmeans(initial, resolved.clusters, kmeans_seed,
                                          resolved.minibatch_kmeans_batch, resolved.minibatch_kmeans_iters)
                .centroids
          : clusterinit::kmeans(initial, resolved.clusters, kmeans_seed, resolved.kmeans_max_iters).centroids;

  std::vector<EpochSummary> history;
  {
    Trainer trainer(model, resolved);
    const dataio::BatchPlan plan{resolved.batch_size, resolved.seed, resolved.epochs};
    int step = 0;
    for (int epoch = 0; epoch < resolved.epochs; ++epoch) {
      const double scale = resolved.lr_scale(epoch);
      EpochSummary summary{epoch, scale, {}};
      const auto batches = dataio::iterate_batches(n, plan, epoch);
      for (const auto& rows : batches) {
        Matrix xb(static_cast<Index>(rows.size()), data.dims());
        std::vector<int> sb(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
          xb.row(static_cast<Index>(r)) = data.features.row(rows[r]);
          sb[r] = data.subgroups[static_cast<std::size_t>(rows[r])];
        }
        const auto& g = trainer.step(xb, sb, scale);
        summary.mean_losses.reconstruction += g.losses.reconstruction;
        summary.mean_losses.adversarial += g.losses.adversarial;
        summary.mean_losses.clustering += g.losses.clustering;
        if (observer) observer(StepReport{epoch, step, rows, &g.state, g.losses});
        ++step;
      }
      const double nb = static_cast<double>(batches.size());
      summary.mean_losses.reconstruction /= nb;
      summary.mean_losses.adversarial /= nb;
      summary.mean_losses.clustering /= nb;
      spdlog::debug("seed {} epoch {:3d} lr_scale {:.0e} L_s {:.6f} L_f {:.6f} L_r {:.6f}", resolved.seed, epoch,
                    scale, summary.mean_losses.reconstruction, summary.mean_losses.adversarial,
                    summary.mean_losses.clustering);
      history.push_back(summary);
    }
  }

  Matrix embeddings = model.embed(data.features);
  Vector scores = score_embeddings(embeddings, model.centroids);
  return FitResult{std::move(model), std::move(scores), std::move(embeddings), std::move(history), resolved};
}

}  // namespace fairod::dcfod
