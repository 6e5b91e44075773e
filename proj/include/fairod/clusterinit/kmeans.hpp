#pragma once

#include <cstdint>
#include <vector>

#include "fairod/numcore/matrix.hpp"

namespace fairod::clusterinit {

using numcore::Index;
using numcore::Matrix;

struct KMeansResult {
  Matrix centroids;                    // K x D
  std::vector<Index> assignments;      // nearest centroid per point
  double inertia = 0.0;                // sum of squared distances to assigned centroid
  std::vector<double> inertia_trace;   // inertia after each assignment step
  int iterations = 0;
};

/// Nearest centroid per row; equidistant ties go to the lowest index.
std::vector<Index> assign_nearest(const Matrix& points, const Matrix& centroids,
                                  std::vector<double>* sq_distances = nullptr);

double inertia(const Matrix& points, const Matrix& centroids, const std::vector<Index>& assignments);

/// k-means++ seeding (D^2 sampling).
Matrix kmeanspp_seed(const Matrix& points, Index k, std::uint64_t seed);

/// Lloyd iterations from k-means++ seeding until the assignment stops changing or max_iters.
/// A centroid left without members is moved onto the point farthest from its nearest centroid.
KMeansResult kmeans(const Matrix& points, Index k, std::uint64_t seed, int max_iters = 300);

/// Mini-batch k-means with per-centroid counts (learning rate 1/count), seeded by k-means++.
KMeansResult minibatch_kmeans(const Matrix& points, Index k, std::uint64_t seed, Index batch_size,
                              int iters);

}  // namespace fairod::clusterinit
