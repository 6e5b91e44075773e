#pragma once

#include <Eigen/Dense>
#include <string>

#include "fairod/errors.hpp"

namespace fairod::numcore {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;
using RowVector = RowVectorX<double>;
using Index = Eigen::Index;

inline std::string shape_string(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

/// Checked product a * b.
template <typename DerivedA, typename DerivedB>
auto matmul(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + shape_string(a.rows(), a.cols()) + " * " +
                         shape_string(b.rows(), b.cols()));
  }
  using Scalar = typename DerivedA::Scalar;
  MatrixX<Scalar> out(a.rows(), b.cols());
  out.noalias() = a * b;
  return out;
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

/// Squared Euclidean distances between every row of `points` and every row of `centers`.
template <typename DerivedP, typename DerivedC>
MatrixX<typename DerivedP::Scalar> pairwise_sq_distances(const Eigen::MatrixBase<DerivedP>& points,
                                                          const Eigen::MatrixBase<DerivedC>& centers) {
  using Scalar = typename DerivedP::Scalar;
  if (points.cols() != centers.cols()) {
    throw DimensionError("pairwise_sq_distances: dimension " + std::to_string(points.cols()) +
                         " vs " + std::to_string(centers.cols()));
  }
  MatrixX<Scalar> out(points.rows(), centers.rows());
  // Direct differences rather than the |a|^2 - 2ab + |b|^2 expansion: exact zeros matter for
  // self-distances and the cancellation error would leak into outlier scores.
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index k = 0; k < centers.rows(); ++k) {
      out(i, k) = (points.row(i) - centers.row(k)).squaredNorm();
    }
  }
  return out;
}

}  // namespace fairod::numcore
