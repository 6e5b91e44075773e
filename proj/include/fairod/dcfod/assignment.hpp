#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fairod/numcore/matrix.hpp"

namespace fairod::dcfod {

using numcore::Index;
using numcore::MatrixX;
using numcore::RowVectorX;
using numcore::VectorX;

/// Student's t soft assignment (one degree of freedom) from squared distances:
/// p_ik = (1 + d_ik)^-1 / sum_j (1 + d_ij)^-1.
template <typename Derived>
MatrixX<typename Derived::Scalar> soft_assign_from_sq(const Eigen::MatrixBase<Derived>& sq_dist) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> p = (Scalar(1) + sq_dist.array()).inverse().matrix();
  const VectorX<Scalar> totals = p.rowwise().sum();
  for (Index i = 0; i < p.rows(); ++i) p.row(i) /= totals(i);
  return p;
}

/// Soft assignment of embeddings `z` (B x D) to centroids `mu` (K x D).
template <typename DerivedZ, typename DerivedM>
MatrixX<typename DerivedZ::Scalar> soft_assign(const Eigen::MatrixBase<DerivedZ>& z,
                                               const Eigen::MatrixBase<DerivedM>& mu) {
  return soft_assign_from_sq(numcore::pairwise_sq_distances(z, mu));
}

/// Sharpened target q_ik = (p_ik^2 / f_k) / sum_j (p_ij^2 / f_j) with f_k = sum_i p_ik over the
/// rows given. Callers treat the result as a constant.
template <typename Derived>
MatrixX<typename Derived::Scalar> auxiliary_target(const Eigen::MatrixBase<Derived>& p) {
  using Scalar = typename Derived::Scalar;
  const RowVectorX<Scalar> freq = p.colwise().sum();
  MatrixX<Scalar> q = p.array().square().matrix();
  for (Index i = 0; i < q.rows(); ++i) {
    q.row(i).array() /= freq.array();
    q.row(i) /= q.row(i).sum();
  }
  return q;
}

/// Index of the smallest entry per row; ties go to the lowest index.
template <typename Derived>
std::vector<Index> nearest_memberships(const Eigen::MatrixBase<Derived>& sq_dist) {
  std::vector<Index> m(static_cast<std::size_t>(sq_dist.rows()));
  for (Index i = 0; i < sq_dist.rows(); ++i) {
    Index best = 0;
    for (Index k = 1; k < sq_dist.cols(); ++k) {
      if (sq_dist(i, k) < sq_dist(i, best)) best = k;
    }
    m[static_cast<std::size_t>(i)] = best;
  }
  return m;
}

/// Index of the largest entry per row; ties go to the lowest index.
template <typename Derived>
std::vector<Index> argmax_rows(const Eigen::MatrixBase<Derived>& p) {
  std::vector<Index> m(static_cast<std::size_t>(p.rows()));
  for (Index i = 0; i < p.rows(); ++i) {
    Index best = 0;
    for (Index k = 1; k < p.cols(); ++k) {
      if (p(i, k) > p(i, best)) best = k;
    }
    m[static_cast<std::size_t>(i)] = best;
  }
  return m;
}

inline constexpr double kScoreEpsilon = 1e-12;

/// Within-cluster distance ratio: each row's distance to its own centroid divided by the largest
/// such distance among rows with the same membership. Clusters whose spread is below
/// kScoreEpsilon score 0.
template <typename Derived>
VectorX<typename Derived::Scalar> outlier_scores_from_sq(const Eigen::MatrixBase<Derived>& sq_dist,
                                                        const std::vector<Index>& memberships) {
  using Scalar = typename Derived::Scalar;
  if (static_cast<Index>(memberships.size()) != sq_dist.rows()) {
    throw DimensionError("outlier_scores: membership count does not match rows");
  }
  VectorX<Scalar> dist(sq_dist.rows());
  std::vector<Scalar> spread(static_cast<std::size_t>(sq_dist.cols()), Scalar(0));
  for (Index i = 0; i < sq_dist.rows(); ++i) {
    const Index k = memberships[static_cast<std::size_t>(i)];
    if (k < 0 || k >= sq_dist.cols()) throw ArgumentError("outlier_scores: membership out of range");
    dist(i) = std::sqrt(sq_dist(i, k));
    spread[static_cast<std::size_t>(k)] = std::max(spread[static_cast<std::size_t>(k)], dist(i));
  }
  VectorX<Scalar> o(sq_dist.rows());
  for (Index i = 0; i < o.size(); ++i) {
    const Scalar denom = spread[static_cast<std::size_t>(memberships[static_cast<std::size_t>(i)])];
    o(i) = denom < Scalar(kScoreEpsilon) ? Scalar(0) : std::min(Scalar(1), dist(i) / denom);
  }
  return o;
}

template <typename DerivedZ, typename DerivedM>
VectorX<typename DerivedZ::Scalar> outlier_scores(const Eigen::MatrixBase<DerivedZ>& z,
                                                  const Eigen::MatrixBase<DerivedM>& mu,
                                                  const std::vector<Index>& memberships) {
  return outlier_scores_from_sq(numcore::pairwise_sq_distances(z, mu), memberships);
}

/// w_i = exp(-o_i) / sum_j exp(-o_j); shifted by min(o) for stability.
template <typename Derived>
VectorX<typename Derived::Scalar> dynamic_weights(const Eigen::MatrixBase<Derived>& o) {
  using Scalar = typename Derived::Scalar;
  if (o.size() == 0) return VectorX<Scalar>();
  const Scalar lo = o.minCoeff();
  VectorX<Scalar> w = (-(o.array() - lo)).exp().matrix();
  return w / w.sum();
}

}  // namespace fairod::dcfod
