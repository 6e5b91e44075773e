#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairod/numcore/mlp.hpp"
#include "fairod/numcore/optimizer.hpp"

namespace fairod::dcfod {

using numcore::Index;

enum class TrainMode {
  kFull,          // adversary + dynamic weights
  kNoAdversary,   // DCOD: no discriminator, adversarial term dropped
  kNoWeights,     // w_i = 1/B in every loss
};

std::string to_string(TrainMode mode);
/// Accepts "full", "dcod" / "no_adversary", "no_weights".
TrainMode parse_mode(const std::string& name);

struct TrainConfig {
  double alpha = 8.0;    // reconstruction coefficient
  double beta = 100.0;   // adversarial coefficient
  Index clusters = 10;
  Index embedding_dim = 64;
  int epochs = 0;        // 0: 40 when N > large_dataset_threshold, else 90
  Index batch_size = 0;  // 0: 256 when N > large_dataset_threshold, else 64
  double learning_rate = 1e-5;           // encoder, decoder
  double centroid_learning_rate = 1e-4;
  double discriminator_learning_rate = 0.0;  // 0: same as learning_rate
  double lr_decay = 0.1;
  int lr_decay_period = 30;              // epochs
  std::uint64_t seed = 0;
  TrainMode mode = TrainMode::kFull;
  numcore::OptimizerKind optimizer = numcore::OptimizerKind::kSgd;

  std::vector<Index> encoder_hidden{500, 500, 2000};
  std::vector<Index> decoder_hidden{2000, 500, 500};
  std::vector<Index> discriminator_hidden{500, 500, 2000};
  double input_dropout = 0.1;
  numcore::Activation activation = numcore::Activation::kRelu;

  Index large_dataset_threshold = 10000;
  int kmeans_max_iters = 300;
  Index minibatch_kmeans_threshold = 10000;  // use mini-batch k-means above this N
  Index minibatch_kmeans_batch = 1024;
  int minibatch_kmeans_iters = 100;

  void validate() const;
  int resolved_epochs(Index n) const;
  Index resolved_batch_size(Index n) const;
  /// Learning-rate multiplier for a zero-based epoch: lr_decay^(epoch / lr_decay_period).
  double lr_scale(int epoch) const;
  bool uses_adversary() const { return mode != TrainMode::kNoAdversary; }
  bool uses_weights() const { return mode != TrainMode::kNoWeights; }
  /// Coefficient actually applied to the adversarial term.
  double effective_beta() const { return uses_adversary() ? beta : 0.0; }
  double resolved_discriminator_learning_rate() const {
    return discriminator_learning_rate > 0.0 ? discriminator_learning_rate : learning_rate;
  }
};

void to_json(nlohmann::json& j, const TrainConfig& c);
/// Missing keys keep their defaults.
void from_json(const nlohmann::json& j, TrainConfig& c);

}  // namespace fairod::dcfod
