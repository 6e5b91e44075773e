#pragma once

#include <cmath>
#include <optional>
#include <span>

#include "fairod/numcore/matrix.hpp"
#include "fairod/numcore/random.hpp"

namespace fairod::numcore {

template <typename Scalar>
struct LayerGradients {
  MatrixX<Scalar> weight;
  RowVectorX<Scalar> bias;
};

/// Affine map y = x W^T + b over row-major batches (one instance per row).
template <typename Scalar>
class LinearLayer {
 public:
  LinearLayer(Index in, Index out)
      : weight_(MatrixX<Scalar>::Zero(out, in)), bias_(RowVectorX<Scalar>::Zero(out)) {
    if (in <= 0 || out <= 0) {
      throw ArgumentError("LinearLayer: widths must be positive, got " + shape_string(out, in));
    }
  }

  Index in_features() const { return weight_.cols(); }
  Index out_features() const { return weight_.rows(); }

  /// Weights ~ U(-a, a) with a = sqrt(6 / (in + out)); bias zero.
  void xavier_init(Rng& rng) {
    const double bound = xavier_bound();
    for (Index r = 0; r < weight_.rows(); ++r) {
      for (Index c = 0; c < weight_.cols(); ++c) {
        weight_(r, c) = static_cast<Scalar>(uniform(rng, -bound, bound));
      }
    }
    bias_.setZero();
  }

  double xavier_bound() const {
    return std::sqrt(6.0 / static_cast<double>(in_features() + out_features()));
  }

  template <typename Derived>
  MatrixX<Scalar> apply(const Eigen::MatrixBase<Derived>& x) const {
    if (x.cols() != in_features()) {
      throw DimensionError("LinearLayer: input has " + std::to_string(x.cols()) +
                           " columns, layer expects " + std::to_string(in_features()));
    }
    MatrixX<Scalar> y(x.rows(), out_features());
    y.noalias() = x * weight_.transpose();
    y.rowwise() += bias_;
    return y;
  }

  MatrixX<Scalar> forward(const MatrixX<Scalar>& x) {
    MatrixX<Scalar> y = apply(x);
    cached_input_ = x;
    return y;
  }

  /// Returns parameter gradients; writes dL/dx into `grad_input` when given.
  LayerGradients<Scalar> backward(const MatrixX<Scalar>& upstream, MatrixX<Scalar>* grad_input) const {
    LayerGradients<Scalar> g;
    backward(upstream, g, grad_input);
    return g;
  }

  /// As above, writing into `out` (storage is reused when the shapes already match).
  void backward(const MatrixX<Scalar>& upstream, LayerGradients<Scalar>& out, MatrixX<Scalar>* grad_input) const {
    if (!cached_input_) throw StateError("LinearLayer::backward called before forward");
    if (upstream.rows() != cached_input_->rows() || upstream.cols() != out_features()) {
      throw DimensionError("LinearLayer::backward: upstream " +
                           shape_string(upstream.rows(), upstream.cols()) + ", expected " +
                           shape_string(cached_input_->rows(), out_features()));
    }
    out.weight.resize(out_features(), in_features());
    out.weight.noalias() = upstream.transpose() * (*cached_input_);
    out.bias = upstream.colwise().sum();
    if (grad_input != nullptr) {
      grad_input->resize(upstream.rows(), in_features());
      grad_input->noalias() = upstream * weight_;
    }
  }

  void clear_cache() { cached_input_.reset(); }

  MatrixX<Scalar>& weight() { return weight_; }
  const MatrixX<Scalar>& weight() const { return weight_; }
  RowVectorX<Scalar>& bias() { return bias_; }
  const RowVectorX<Scalar>& bias() const { return bias_; }

 private:
  MatrixX<Scalar> weight_;  // out x in
  RowVectorX<Scalar> bias_;
  std::optional<MatrixX<Scalar>> cached_input_;
};

}  // namespace fairod::numcore
