#include "fairod/clusterinit/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "fairod/errors.hpp"
#include "fairod/numcore/random.hpp"

namespace fairod::clusterinit {

namespace {

void check_args(const Matrix& points, Index k) {
  if (k < 1) throw ArgumentError("kmeans: K must be at least 1");
  if (points.rows() < k) {
    throw ArgumentError("kmeans: need at least K=" + std::to_string(k) + " points, got " +
                        std::to_string(points.rows()));
  }
  if (!points.allFinite()) throw ArgumentError("kmeans: non-finite input");
}

// Moves every member-less centroid onto the point currently farthest from its own centroid,
// reassigning after each move. Stops early if every point already sits on a centroid.
void repair_empty_clusters(const Matrix& points, Matrix& centroids, std::vector<Index>& assignments,
                           std::vector<double>& sq_dist) {
  const Index k = centroids.rows();
  for (;;) {
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index a : assignments) ++counts[static_cast<std::size_t>(a)];
    const auto empty = std::find(counts.begin(), counts.end(), 0);
    if (empty == counts.end()) return;
    const auto far = std::max_element(sq_dist.begin(), sq_dist.end());
    if (*far <= 0.0) return;
    const auto point = static_cast<Index>(far - sq_dist.begin());
    centroids.row(empty - counts.begin()) = points.row(point);
    assignments = assign_nearest(points, centroids, &sq_dist);
  }
}

Matrix cluster_means(const Matrix& points, const Matrix& previous, const std::vector<Index>& assignments) {
  Matrix sums = Matrix::Zero(previous.rows(), previous.cols());
  std::vector<Index> counts(static_cast<std::size_t>(previous.rows()), 0);
  for (Index i = 0; i < points.rows(); ++i) {
    const Index a = assignments[static_cast<std::size_t>(i)];
    sums.row(a) += points.row(i);
    ++counts[static_cast<std::size_t>(a)];
  }
  for (Index c = 0; c < sums.rows(); ++c) {
    const auto n = counts[static_cast<std::size_t>(c)];
    if (n > 0) {
      sums.row(c) /= static_cast<double>(n);
    } else {
      sums.row(c) = previous.row(c);
    }
  }
  return sums;
}

}  // namespace

std::vector<Index> assign_nearest(const Matrix& points, const Matrix& centroids,
                                  std::vector<double>* sq_distances) {
  if (points.cols() != centroids.cols()) throw DimensionError("assign_nearest: dimension mismatch");
  std::vector<Index> out(static_cast<std::size_t>(points.rows()));
  if (sq_distances != nullptr) sq_distances->assign(static_cast<std::size_t>(points.rows()), 0.0);
  for (Index i = 0; i < points.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    Index arg = 0;
    for (Index c = 0; c < centroids.rows(); ++c) {
      const double d = (points.row(i) - centroids.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        arg = c;
      }
    }
    out[static_cast<std::size_t>(i)] = arg;
    if (sq_distances != nullptr) (*sq_distances)[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

double inertia(const Matrix& points, const Matrix& centroids, const std::vector<Index>& assignments) {
  double total = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    total += (points.row(i) - centroids.row(assignments[static_cast<std::size_t>(i)])).squaredNorm();
  }
  return total;
}

Matrix kmeanspp_seed(const Matrix& points, Index k, std::uint64_t seed) {
  check_args(points, k);
  auto rng = numcore::make_stream(seed, /*stream=*/0xc1u);
  const Index n = points.rows();
  Matrix centroids(k, points.cols());
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);

  auto first = static_cast<Index>(numcore::uniform_index(rng, static_cast<std::uint64_t>(n)));
  centroids.row(0) = points.row(first);
  chosen[static_cast<std::size_t>(first)] = true;
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = (points.row(i) - centroids.row(0)).squaredNorm();

  for (Index c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    Index pick = -1;
    if (total > 0.0) {
      double target = numcore::uniform01(rng) * total;
      for (Index i = 0; i < n; ++i) {
        const double w = d2[static_cast<std::size_t>(i)];
        if (w <= 0.0) continue;
        pick = i;
        if (target < w) break;
        target -= w;
      }
    } else {
      // All remaining mass is zero (duplicate points): take the first unchosen row.
      for (Index i = 0; i < n && pick < 0; ++i) {
        if (!chosen[static_cast<std::size_t>(i)]) pick = i;
      }
    }
    centroids.row(c) = points.row(pick);
    chosen[static_cast<std::size_t>(pick)] = true;
    for (Index i = 0; i < n; ++i) {
      d2[static_cast<std::size_t>(i)] =
          std::min(d2[static_cast<std::size_t>(i)], (points.row(i) - centroids.row(c)).squaredNorm());
    }
  }
  return centroids;
}

KMeansResult kmeans(const Matrix& points, Index k, std::uint64_t seed, int max_iters) {
  check_args(points, k);
  if (max_iters < 1) throw ArgumentError("kmeans: max_iters must be positive");
  KMeansResult result;
  result.centroids = kmeanspp_seed(points, k, seed);

  std::vector<double> sq_dist;
  std::vector<Index> previous;
  bool converged = false;
  for (int it = 0; it < max_iters; ++it) {
    auto assignment = assign_nearest(points, result.centroids, &sq_dist);
    repair_empty_clusters(points, result.centroids, assignment, sq_dist);
    result.inertia_trace.push_back(std::accumulate(sq_dist.begin(), sq_dist.end(), 0.0));
    result.iterations = it + 1;
    if (assignment == previous) {
      converged = true;
      break;
    }
    previous = std::move(assignment);
    result.centroids = cluster_means(points, result.centroids, previous);
  }
  if (!converged) {
    previous = assign_nearest(points, result.centroids, &sq_dist);
    repair_empty_clusters(points, result.centroids, previous, sq_dist);
  }
  result.assignments = std::move(previous);
  result.inertia = inertia(points, result.centroids, result.assignments);
  return result;
}

KMeansResult minibatch_kmeans(const Matrix& points, Index k, std::uint64_t seed, Index batch_size,
                              int iters) {
  check_args(points, k);
  if (batch_size < 1) throw ArgumentError("minibatch_kmeans: batch size must be positive");
  if (iters < 1) throw ArgumentError("minibatch_kmeans: iters must be positive");
  const Index n = points.rows();
  KMeansResult result;
  result.centroids = kmeanspp_seed(points, k, seed);
  auto rng = numcore::make_stream(seed, /*stream=*/0xc2u);

  std::vector<double> counts(static_cast<std::size_t>(k), 0.0);
  std::vector<Index> indices(static_cast<std::size_t>(n));
  std::iota(indices.begin(), indices.end(), Index{0});
  const Index b = std::min(batch_size, n);
  for (int it = 0; it < iters; ++it) {
    if (b < n) {
      // Partial Fisher-Yates: the first b entries become a uniform sample without replacement.
      for (Index i = 0; i < b; ++i) {
        const auto j = i + static_cast<Index>(numcore::uniform_index(rng, static_cast<std::uint64_t>(n - i)));
        std::swap(indices[static_cast<std::size_t>(i)], indices[static_cast<std::size_t>(j)]);
      }
    }
    Matrix batch(b, points.cols());
    for (Index i = 0; i < b; ++i) batch.row(i) = points.row(indices[static_cast<std::size_t>(i)]);
    const auto assignment = assign_nearest(batch, result.centroids);
    for (Index i = 0; i < b; ++i) {
      const Index c = assignment[static_cast<std::size_t>(i)];
      const double eta = 1.0 / ++counts[static_cast<std::size_t>(c)];
      result.centroids.row(c) = (1.0 - eta) * result.centroids.row(c) + eta * batch.row(i);
    }
    result.iterations = it + 1;
  }
  std::vector<double> sq_dist;
  result.assignments = assign_nearest(points, result.centroids, &sq_dist);
  repair_empty_clusters(points, result.centroids, result.assignments, sq_dist);
  result.inertia = inertia(points, result.centroids, result.assignments);
  result.inertia_trace.push_back(result.inertia);
  return result;
}

}  // namespace fairod::clusterinit
