#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fairod/dcfod/config.hpp"
#include "fairod/numcore/matrix.hpp"
#include "fairod/numcore/mlp.hpp"

namespace fairod::dcfod {

using numcore::Matrix;
using numcore::Vector;

/// Encoder f, decoder h, optional subgroup discriminator g and the centroid block mu. The
/// networks run in `Scalar` precision; centroids, batch statistics and losses stay in double.
template <typename Scalar>
struct BasicDcfodModel {
  using Net = numcore::Mlp<Scalar>;

  Net encoder;
  Net decoder;
  std::optional<Net> discriminator;
  Matrix centroids;  // K x D

  /// Builds the three networks for `input_dims` features and `num_subgroups` classes; the
  /// discriminator is omitted in no-adversary mode. Centroids start at zero.
  static BasicDcfodModel build(Index input_dims, int num_subgroups, const TrainConfig& config);

  /// Xavier-uniform initialization, each network from its own stream under `seed`.
  void initialize(std::uint64_t seed);

  Index input_dims() const { return encoder.input_width(); }
  Index embedding_dim() const { return encoder.output_width(); }
  Index clusters() const { return centroids.rows(); }

  /// Dropout-free embedding of every row, processed in chunks.
  Matrix embed(const Matrix& x, Index chunk = 2048) const;

  /// Outlier score of every row with cluster spreads taken over all rows given.
  Vector score(const Matrix& x) const;
};

/// Training precision, matching the float32 default of common deep-learning frameworks.
using DcfodModel = BasicDcfodModel<float>;
/// Double-precision twin for finite-difference checks.
using DcfodModel64 = BasicDcfodModel<double>;
using Network = DcfodModel::Net;
using Network64 = DcfodModel64::Net;

extern template struct BasicDcfodModel<float>;
extern template struct BasicDcfodModel<double>;

/// Scores from already-computed embeddings (full-scope denominators).
Vector score_embeddings(const Matrix& z, const Matrix& centroids);

}  // namespace fairod::dcfod
