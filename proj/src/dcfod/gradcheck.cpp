#include "fairod/dcfod/gradcheck.hpp"

#include "fairod/dcfod/trainer.hpp"
#include "fairod/numcore/random.hpp"

namespace fairod::dcfod {

namespace {

void add_network(std::vector<numcore::GradientBlock>& out, const std::string& name, Network64& net,
                 const numcore::MlpGradients<double>& grads) {
  auto params = net.parameter_blocks();
  auto analytic = Network64::gradient_blocks(grads);
  for (std::size_t i = 0; i < params.size(); ++i) {
    out.push_back({name + (i % 2 == 0 ? ".W" : ".b") + std::to_string(i / 2), params[i], analytic[i]});
  }
}

std::size_t total_size(const std::vector<numcore::GradientBlock>& blocks) {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.params.size();
  return n;
}

}  // namespace

std::vector<ObjectiveCheck> run_objective_gradcheck(std::uint64_t seed, double tolerance) {
  TrainConfig config;
  config.seed = seed;
  config.clusters = 2;
  config.embedding_dim = 2;
  config.encoder_hidden = {3};
  config.decoder_hidden = {3};
  config.discriminator_hidden = {3};
  config.input_dropout = 0.0;
  // Smooth activations keep finite differences away from ReLU kinks.
  config.activation = numcore::Activation::kTanh;

  constexpr Index kBatch = 8;
  DcfodModel64 model = DcfodModel64::build(2, 2, config);
  model.initialize(seed);

  auto rng = numcore::make_stream(seed, 0x6c);
  Matrix x(kBatch, 2);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = numcore::standard_normal(rng);
  for (Index i = 0; i < model.centroids.size(); ++i) model.centroids.data()[i] = numcore::standard_normal(rng);
  std::vector<int> groups(kBatch);
  for (Index i = 0; i < kBatch; ++i) groups[static_cast<std::size_t>(i)] = static_cast<int>(i % 2);

  const BatchState initial = make_batch_state(model.encoder.predict(x), model.centroids, true);
  const FrozenTargets frozen{initial.weights, initial.q};

  struct Term {
    std::string name;
    ObjectiveWeights weights;
    bool discriminator;
    double alpha, cluster, beta;  // coefficients of the scalar being differentiated
  };
  const std::vector<Term> terms = {
      {"L_s", {1.0, 0.0, 0.0}, false, 1.0, 0.0, 0.0},
      {"L_f (discriminator)", {0.0, 0.0, 0.0}, true, 0.0, 0.0, -1.0},
      {"L_f (encoder)", {0.0, 0.0, -1.0}, false, 0.0, 0.0, -1.0},
      {"L_r", {0.0, 1.0, 0.0}, false, 0.0, 1.0, 0.0},
      {"objective", {config.alpha, 1.0, config.beta}, false, config.alpha, 1.0, config.beta},
  };

  std::vector<ObjectiveCheck> checks;
  for (const auto& term : terms) {
    const auto g =
        compute_batch_gradients(model, x, groups, config, term.weights, false, nullptr, &frozen);
    std::vector<numcore::GradientBlock> blocks;
    if (term.discriminator) {
      add_network(blocks, "discriminator", *model.discriminator, *g.discriminator);
    } else {
      add_network(blocks, "encoder", model.encoder, g.encoder);
      add_network(blocks, "decoder", model.decoder, g.decoder);
      blocks.push_back({"centroids",
                        {model.centroids.data(), static_cast<std::size_t>(model.centroids.size())},
                        {g.centroids.data(), static_cast<std::size_t>(g.centroids.size())}});
    }
    auto loss = [&] {
      const LossValues l = evaluate_losses(model, x, groups, config, &frozen);
      return term.alpha * l.reconstruction + term.cluster * l.clustering - term.beta * l.adversarial;
    };
    checks.push_back({term.name, total_size(blocks), numcore::check_gradients(blocks, loss, tolerance)});
  }
  return checks;
}

}  // namespace fairod::dcfod
