#pragma once

#include <cmath>
#include <span>

#include "fairod/dcfod/assignment.hpp"

namespace fairod::dcfod {

/// A loss value and its gradient with respect to the tensor it was computed from.
template <typename Scalar>
struct LossGrad {
  Scalar value = 0;
  MatrixX<Scalar> grad;
};

/// L_s = sum_i w_i * |x_i - xhat_i|^2; gradient w.r.t. xhat.
template <typename Scalar>
LossGrad<Scalar> reconstruction_loss(const MatrixX<Scalar>& x, const MatrixX<Scalar>& xhat,
                                     const VectorX<Scalar>& w) {
  if (x.rows() != xhat.rows() || x.cols() != xhat.cols() || w.size() != x.rows()) {
    throw DimensionError("reconstruction_loss: shape mismatch");
  }
  const MatrixX<Scalar> diff = xhat - x;
  LossGrad<Scalar> out;
  out.value = (diff.rowwise().squaredNorm().array() * w.array()).sum();
  out.grad = Scalar(2) * (diff.array().colwise() * w.array()).matrix();
  return out;
}

/// L_f = sum_i w_i * CE(logits_i, s_i) via log-sum-exp; gradient w.r.t. logits.
template <typename Scalar>
LossGrad<Scalar> adversarial_loss(const MatrixX<Scalar>& logits, std::span<const int> groups,
                                  const VectorX<Scalar>& w) {
  if (static_cast<Index>(groups.size()) != logits.rows() || w.size() != logits.rows()) {
    throw DimensionError("adversarial_loss: shape mismatch");
  }
  LossGrad<Scalar> out;
  out.grad.resize(logits.rows(), logits.cols());
  for (Index i = 0; i < logits.rows(); ++i) {
    const int s = groups[static_cast<std::size_t>(i)];
    if (s < 0 || s >= logits.cols()) throw ArgumentError("adversarial_loss: subgroup out of range");
    const Scalar top = logits.row(i).maxCoeff();
    const auto shifted = (logits.row(i).array() - top).exp();
    const Scalar total = shifted.sum();
    const Scalar lse = top + std::log(total);
    out.value += w(i) * (lse - logits(i, s));
    out.grad.row(i) = w(i) * (shifted / total).matrix();
    out.grad(i, s) -= w(i);
  }
  return out;
}

template <typename Scalar>
struct ClusteringLoss {
  Scalar value = 0;
  MatrixX<Scalar> grad_z;   // B x D
  MatrixX<Scalar> grad_mu;  // K x D
};

/// L_r = sum_i sum_k w_i p_ik log(p_ik / q_ik) with P recomputed from (z, mu) and Q held fixed.
template <typename Scalar>
ClusteringLoss<Scalar> clustering_loss(const MatrixX<Scalar>& z, const MatrixX<Scalar>& mu,
                                       const MatrixX<Scalar>& q, const VectorX<Scalar>& w) {
  const MatrixX<Scalar> sq = numcore::pairwise_sq_distances(z, mu);
  if (q.rows() != sq.rows() || q.cols() != sq.cols() || w.size() != z.rows()) {
    throw DimensionError("clustering_loss: shape mismatch");
  }
  const MatrixX<Scalar> kernel = (Scalar(1) + sq.array()).inverse().matrix();
  const MatrixX<Scalar> p = soft_assign_from_sq(sq);
  const MatrixX<Scalar> log_ratio = (p.array() / q.array()).log().matrix();

  ClusteringLoss<Scalar> out;
  out.value = ((p.array() * log_ratio.array()).rowwise().sum() * w.array()).sum();

  // dL/dp_ik = w_i (log(p_ik/q_ik) + 1); through the row normalization and the t-kernel,
  // dL/dd_ik = -t_ik p_ik (dL/dp_ik - sum_j p_ij dL/dp_ij).
  MatrixX<Scalar> g = ((log_ratio.array() + Scalar(1)).colwise() * w.array()).matrix();
  const VectorX<Scalar> centre = (g.array() * p.array()).rowwise().sum();
  MatrixX<Scalar> a = -(kernel.array() * p.array() * (g.array().colwise() - centre.array())).matrix();

  const VectorX<Scalar> row_sum = a.rowwise().sum();
  const VectorX<Scalar> col_sum = a.colwise().sum().transpose();
  out.grad_z = Scalar(2) * ((z.array().colwise() * row_sum.array()).matrix() - a * mu);
  out.grad_mu = Scalar(-2) * (a.transpose() * z - (mu.array().colwise() * col_sum.array()).matrix());
  return out;
}

}  // namespace fairod::dcfod
