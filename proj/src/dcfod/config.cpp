#include "fairod/dcfod/config.hpp"

#include <cmath>
#include <set>

#include "fairod/errors.hpp"

namespace fairod::dcfod {

std::string to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::kFull: return "full";
    case TrainMode::kNoAdversary: return "dcod";
    case TrainMode::kNoWeights: return "no_weights";
  }
  return "full";
}

TrainMode parse_mode(const std::string& name) {
  if (name == "full") return TrainMode::kFull;
  if (name == "dcod" || name == "no_adversary") return TrainMode::kNoAdversary;
  if (name == "no_weights") return TrainMode::kNoWeights;
  throw ArgumentError("unknown mode '" + name + "' (expected full, dcod or no_weights)");
}

void TrainConfig::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw ArgumentError("alpha and beta must be non-negative");
  if (clusters < 2) throw ArgumentError("cluster count must be at least 2");
  if (embedding_dim < 1) throw ArgumentError("embedding dimension must be positive");
  if (epochs < 0 || batch_size < 0) throw ArgumentError("epochs and batch size must be non-negative");
  if (!(learning_rate >= 0.0) || !(centroid_learning_rate >= 0.0) || !(discriminator_learning_rate >= 0.0)) {
    throw ArgumentError("learning rates must be non-negative");
  }
  if (!(lr_decay > 0.0) || lr_decay_period < 1) throw ArgumentError("invalid learning-rate schedule");
  if (!(input_dropout >= 0.0 && input_dropout < 1.0)) throw ArgumentError("dropout must lie in [0, 1)");
  for (const auto* widths : {&encoder_hidden, &decoder_hidden, &discriminator_hidden}) {
    for (Index w : *widths) {
      if (w < 1) throw ArgumentError("hidden widths must be positive");
    }
  }
  if (kmeans_max_iters < 1 || minibatch_kmeans_batch < 1 || minibatch_kmeans_iters < 1) {
    throw ArgumentError("invalid k-means settings");
  }
}

int TrainConfig::resolved_epochs(Index n) const {
  if (epochs > 0) return epochs;
  return n > large_dataset_threshold ? 40 : 90;
}

Index TrainConfig::resolved_batch_size(Index n) const {
  if (batch_size > 0) return batch_size;
  return n > large_dataset_threshold ? 256 : 64;
}

double TrainConfig::lr_scale(int epoch) const {
  return std::pow(lr_decay, static_cast<double>(epoch / lr_decay_period));
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {
      {"alpha", c.alpha},
      {"beta", c.beta},
      {"clusters", c.clusters},
      {"embedding_dim", c.embedding_dim},
      {"epochs", c.epochs},
      {"batch_size", c.batch_size},
      {"learning_rate", c.learning_rate},
      {"centroid_learning_rate", c.centroid_learning_rate},
      {"discriminator_learning_rate", c.discriminator_learning_rate},
      {"lr_decay", c.lr_decay},
      {"lr_decay_period", c.lr_decay_period},
      {"seed", c.seed},
      {"mode", to_string(c.mode)},
      {"optimizer", numcore::to_string(c.optimizer)},
      {"encoder_hidden", c.encoder_hidden},
      {"decoder_hidden", c.decoder_hidden},
      {"discriminator_hidden", c.discriminator_hidden},
      {"input_dropout", c.input_dropout},
      {"activation", numcore::to_string(c.activation)},
      {"large_dataset_threshold", c.large_dataset_threshold},
      {"kmeans_max_iters", c.kmeans_max_iters},
      {"minibatch_kmeans_threshold", c.minibatch_kmeans_threshold},
      {"minibatch_kmeans_batch", c.minibatch_kmeans_batch},
      {"minibatch_kmeans_iters", c.minibatch_kmeans_iters},
  };
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  static const std::set<std::string> known{
      "alpha", "beta", "clusters", "embedding_dim", "epochs", "batch_size", "learning_rate",
      "centroid_learning_rate", "discriminator_learning_rate", "lr_decay", "lr_decay_period", "seed", "mode", "optimizer",
      "encoder_hidden", "decoder_hidden", "discriminator_hidden", "input_dropout", "activation",
      "large_dataset_threshold", "kmeans_max_iters", "minibatch_kmeans_threshold",
      "minibatch_kmeans_batch", "minibatch_kmeans_iters"};
  for (const auto& item : j.items()) {
    if (!known.contains(item.key())) throw ArgumentError("train config: unknown key '" + item.key() + "'");
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("alpha", c.alpha);
    get("beta", c.beta);
    get("clusters", c.clusters);
    get("embedding_dim", c.embedding_dim);
    get("epochs", c.epochs);
    get("batch_size", c.batch_size);
    get("learning_rate", c.learning_rate);
    get("centroid_learning_rate", c.centroid_learning_rate);
    get("discriminator_learning_rate", c.discriminator_learning_rate);
    get("lr_decay", c.lr_decay);
    get("lr_decay_period", c.lr_decay_period);
    get("seed", c.seed);
    if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
    if (j.contains("optimizer")) c.optimizer = numcore::parse_optimizer(j.at("optimizer").get<std::string>());
    get("encoder_hidden", c.encoder_hidden);
    get("decoder_hidden", c.decoder_hidden);
    get("discriminator_hidden", c.discriminator_hidden);
    get("input_dropout", c.input_dropout);
    if (j.contains("activation")) c.activation = numcore::parse_activation(j.at("activation").get<std::string>());
    get("large_dataset_threshold", c.large_dataset_threshold);
    get("kmeans_max_iters", c.kmeans_max_iters);
    get("minibatch_kmeans_threshold", c.minibatch_kmeans_threshold);
    get("minibatch_kmeans_batch", c.minibatch_kmeans_batch);
    get("minibatch_kmeans_iters", c.minibatch_kmeans_iters);
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("train config: ") + e.what());
  }
}

}  // namespace fairod::dcfod
