#pragma once

#include <span>
#include <string>
#include <vector>

#include "fairod/numcore/linear_layer.hpp"

namespace fairod::numcore {

enum class Activation { kRelu, kTanh, kIdentity };

inline std::string to_string(Activation a) {
  switch (a) {
    case Activation::kRelu: return "relu";
    case Activation::kTanh: return "tanh";
    case Activation::kIdentity: return "identity";
  }
  return "relu";
}

inline Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "identity" || name == "linear") return Activation::kIdentity;
  throw ArgumentError("unknown activation '" + name + "'");
}

/// Layer widths including the input width, e.g. {n, 500, 500, 2000, 64}.
struct MlpSpec {
  std::vector<Index> widths;
  double input_dropout = 0.0;
  Activation hidden_activation = Activation::kRelu;

  void validate() const {
    if (widths.size() < 2) throw ArgumentError("MlpSpec: need at least one layer");
    for (Index w : widths) {
      if (w <= 0) throw ArgumentError("MlpSpec: widths must be positive");
    }
    if (!(input_dropout >= 0.0 && input_dropout < 1.0)) {
      throw ArgumentError("MlpSpec: dropout rate must lie in [0, 1)");
    }
  }
};

template <typename Scalar>
struct MlpGradients {
  std::vector<LayerGradients<Scalar>> layers;
  MatrixX<Scalar> input;
};

/// Feed-forward chain: input dropout, then (linear, activation) per hidden layer, linear output.
template <typename Scalar>
class Mlp {
 public:
  explicit Mlp(MlpSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    for (std::size_t i = 0; i + 1 < spec_.widths.size(); ++i) {
      layers_.emplace_back(spec_.widths[i], spec_.widths[i + 1]);
    }
  }

  const MlpSpec& spec() const { return spec_; }
  Index input_width() const { return spec_.widths.front(); }
  Index output_width() const { return spec_.widths.back(); }
  std::vector<LinearLayer<Scalar>>& layers() { return layers_; }
  const std::vector<LinearLayer<Scalar>>& layers() const { return layers_; }

  void xavier_init(Rng& rng) {
    for (auto& layer : layers_) layer.xavier_init(rng);
  }

  Index parameter_count() const {
    Index n = 0;
    for (const auto& layer : layers_) n += layer.weight().size() + layer.bias().size();
    return n;
  }

  /// Training forward pass; caches activations for backward. Dropout draws from `rng` and is
  /// skipped when `training` is false or the rate is zero.
  MatrixX<Scalar> forward(const MatrixX<Scalar>& x, bool training, Rng* rng = nullptr) {
    check_input(x);
    MatrixX<Scalar> h = x;
    dropout_mask_.reset();
    if (training && spec_.input_dropout > 0.0) {
      if (rng == nullptr) throw ArgumentError("Mlp::forward: dropout needs a generator");
      const double keep = 1.0 - spec_.input_dropout;
      const Scalar scale = static_cast<Scalar>(1.0 / keep);
      MatrixX<Scalar> mask(x.rows(), x.cols());
      for (Index i = 0; i < mask.size(); ++i) {
        mask.data()[i] = uniform01(*rng) < keep ? scale : Scalar(0);
      }
      h = h.cwiseProduct(mask);
      dropout_mask_ = std::move(mask);
    }
    activations_.resize(layers_.size() - 1);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      h = layers_[l].forward(h);
      if (l + 1 < layers_.size()) {
        activate(h);
        activations_[l] = h;
      }
    }
    has_forward_ = true;
    return h;
  }

  /// Inference pass without dropout or caching.
  MatrixX<Scalar> predict(const MatrixX<Scalar>& x) const {
    check_input(x);
    MatrixX<Scalar> h = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      h = layers_[l].apply(h);
      if (l + 1 < layers_.size()) activate(h);
    }
    return h;
  }

  /// Reverse-mode gradients of the last forward pass given dL/d(output).
  MlpGradients<Scalar> backward(const MatrixX<Scalar>& upstream) const {
    MlpGradients<Scalar> grads;
    backward(upstream, grads);
    return grads;
  }

  /// As above, reusing the storage in `grads` across calls.
  void backward(const MatrixX<Scalar>& upstream, MlpGradients<Scalar>& grads) const {
    if (!has_forward_) throw StateError("Mlp::backward called before forward");
    grads.layers.resize(layers_.size());
    MatrixX<Scalar> g = upstream;
    MatrixX<Scalar> grad_in;
    for (std::size_t l = layers_.size(); l-- > 0;) {
      if (l + 1 < layers_.size()) activation_backward(activations_[l], g);
      layers_[l].backward(g, grads.layers[l], &grad_in);
      g.swap(grad_in);
    }
    if (dropout_mask_) g = g.cwiseProduct(*dropout_mask_);
    grads.input = std::move(g);
  }

  /// Flat views over every parameter block, ordered (W0, b0, W1, b1, ...).
  std::vector<std::span<Scalar>> parameter_blocks() {
    std::vector<std::span<Scalar>> out;
    for (auto& layer : layers_) {
      out.emplace_back(layer.weight().data(), static_cast<std::size_t>(layer.weight().size()));
      out.emplace_back(layer.bias().data(), static_cast<std::size_t>(layer.bias().size()));
    }
    return out;
  }

  static std::vector<std::span<const Scalar>> gradient_blocks(const MlpGradients<Scalar>& g) {
    std::vector<std::span<const Scalar>> out;
    for (const auto& lg : g.layers) {
      out.emplace_back(lg.weight.data(), static_cast<std::size_t>(lg.weight.size()));
      out.emplace_back(lg.bias.data(), static_cast<std::size_t>(lg.bias.size()));
    }
    return out;
  }

 private:
  void check_input(const MatrixX<Scalar>& x) const {
    if (x.cols() != input_width()) {
      throw DimensionError("Mlp: input has " + std::to_string(x.cols()) + " columns, expected " +
                           std::to_string(input_width()));
    }
  }

  void activate(MatrixX<Scalar>& h) const {
    switch (spec_.hidden_activation) {
      case Activation::kRelu: h = h.cwiseMax(Scalar(0)); break;
      case Activation::kTanh: h = h.array().tanh().matrix(); break;
      case Activation::kIdentity: break;
    }
  }

  // `out` is the post-activation value; both derivatives are expressible through it.
  void activation_backward(const MatrixX<Scalar>& out, MatrixX<Scalar>& g) const {
    switch (spec_.hidden_activation) {
      case Activation::kRelu:
        g = (out.array() > Scalar(0)).select(g, Scalar(0));
        break;
      case Activation::kTanh:
        g = g.cwiseProduct((Scalar(1) - out.array().square()).matrix());
        break;
      case Activation::kIdentity: break;
    }
  }

  MlpSpec spec_;
  std::vector<LinearLayer<Scalar>> layers_;
  std::vector<MatrixX<Scalar>> activations_;
  std::optional<MatrixX<Scalar>> dropout_mask_;
  bool has_forward_ = false;
};

}  // namespace fairod::numcore
