#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fairod/errors.hpp"

namespace fairod::numcore {

/// theta <- theta - learning_rate * grad
template <typename Scalar>
void sgd_step(std::span<Scalar> params, std::span<const Scalar> grads, double learning_rate) {
  if (params.size() != grads.size()) {
    throw DimensionError("sgd_step: " + std::to_string(params.size()) + " parameters vs " +
                         std::to_string(grads.size()) + " gradients");
  }
  const auto lr = static_cast<Scalar>(learning_rate);
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grads[i];
}

template <typename Scalar>
void sgd_step(const std::vector<std::span<Scalar>>& params,
              const std::vector<std::span<const Scalar>>& grads, double learning_rate) {
  if (params.size() != grads.size()) throw DimensionError("sgd_step: block count mismatch");
  for (std::size_t b = 0; b < params.size(); ++b) sgd_step(params[b], grads[b], learning_rate);
}

enum class OptimizerKind { kSgd, kAdam };

inline std::string to_string(OptimizerKind k) { return k == OptimizerKind::kSgd ? "sgd" : "adam"; }

inline OptimizerKind parse_optimizer(const std::string& name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  throw ArgumentError("unknown optimizer '" + name + "'");
}

/// Optimizer over a fixed list of parameter blocks. Plain SGD keeps no state; Adam keeps first
/// and second moment estimates per entry, in the parameters' precision.
template <typename Scalar>
class BasicBlockOptimizer {
 public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  BasicBlockOptimizer() = default;
  BasicBlockOptimizer(OptimizerKind kind, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : kind_(kind), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  OptimizerKind kind() const { return kind_; }

  void step(const std::vector<std::span<Scalar>>& params,
            const std::vector<std::span<const Scalar>>& grads, double learning_rate) {
    if (params.size() != grads.size()) throw DimensionError("optimizer: block count mismatch");
    if (kind_ == OptimizerKind::kSgd) {
      sgd_step(params, grads, learning_rate);
      return;
    }
    if (first_.empty()) {
      for (const auto& p : params) {
        first_.push_back(Array::Zero(static_cast<Eigen::Index>(p.size())));
        second_.push_back(Array::Zero(static_cast<Eigen::Index>(p.size())));
      }
    }
    if (first_.size() != params.size()) throw DimensionError("optimizer: block layout changed");
    ++steps_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
    // lr * (m / c1) / (sqrt(v / c2) + eps) == step_size * m / (sqrt(v) + eps_hat)
    const auto b1 = static_cast<Scalar>(beta1_);
    const auto b2 = static_cast<Scalar>(beta2_);
    const auto step_size = static_cast<Scalar>(learning_rate * std::sqrt(c2) / c1);
    const auto eps_hat = static_cast<Scalar>(eps_ * std::sqrt(c2));
    for (std::size_t b = 0; b < params.size(); ++b) {
      const auto n = static_cast<Eigen::Index>(params[b].size());
      if (params[b].size() != grads[b].size() || n != first_[b].size()) {
        throw DimensionError("optimizer: block size mismatch");
      }
      Eigen::Map<Array> p(params[b].data(), n);
      const Eigen::Map<const Array> g(grads[b].data(), n);
      auto& m = first_[b];
      auto& v = second_[b];
      m = b1 * m + (Scalar(1) - b1) * g;
      v = b2 * v + (Scalar(1) - b2) * g.square();
      p -= step_size * m / (v.sqrt() + eps_hat);
    }
  }

 private:
  OptimizerKind kind_ = OptimizerKind::kSgd;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  long steps_ = 0;
  std::vector<Array> first_;
  std::vector<Array> second_;
};

using BlockOptimizer = BasicBlockOptimizer<double>;

}  // namespace fairod::numcore
