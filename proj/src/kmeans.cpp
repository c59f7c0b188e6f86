#include <algorithm>
#include <limits>
#include <string>

#include "clusterkriging/error.hpp"
#include "clusterkriging/partition.hpp"
#include "clusterkriging/random.hpp"

namespace ck {

namespace {

Matrix plus_plus_init(const Eigen::Ref<const Matrix>& points, Index k, Rng& rng) {
  const Index n = points.rows();
  Matrix centroids(k, points.cols());
  centroids.row(0) = points.row(rng.below(n));
  Vector nearest = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (Index j = 1; j < k; ++j) {
    const double total = nearest.sum();
    Index pick = rng.below(n);
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (Index i = 0; i < n; ++i) {
        target -= nearest(i);
        if (target < 0.0 || i == n - 1) {
          pick = i;
          break;
        }
      }
    }
    centroids.row(j) = points.row(pick);
    nearest = nearest.cwiseMin((points.rowwise() - centroids.row(j)).rowwise().squaredNorm());
  }
  return centroids;
}

}  // namespace

KMeansResult kmeans(const Eigen::Ref<const Matrix>& points, Index k, std::uint64_t seed,
                    const KMeansOptions& options) {
  const Index n = points.rows();
  if (k < 1) throw ParameterError("k-means needs k >= 1");
  if (k > n) throw ParameterError("k-means: k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));

  Rng rng(seed);
  KMeansResult out;
  if (options.plus_plus) {
    out.centroids = plus_plus_init(points, k, rng);
  } else {
    const IndexSet picks = sample_without_replacement(n, k, rng);
    out.centroids.resize(k, points.cols());
    for (Index j = 0; j < k; ++j) out.centroids.row(j) = points.row(picks[static_cast<std::size_t>(j)]);
  }

  out.labels.assign(static_cast<std::size_t>(n), -1);
  Vector cost(n);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (Index j = 0; j < k; ++j) {
        const double d = (points.row(i) - out.centroids.row(j)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      cost(i) = best_d;
      if (out.labels[static_cast<std::size_t>(i)] != best) changed = true;
      out.labels[static_cast<std::size_t>(i)] = best;
    }

    // Empty clusters take the point farthest from its own centroid.
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index l : out.labels) ++counts[static_cast<std::size_t>(l)];
    for (Index j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) continue;
      Index far = -1;
      for (Index i = 0; i < n; ++i) {
        if (counts[static_cast<std::size_t>(out.labels[static_cast<std::size_t>(i)])] < 2) continue;
        if (far < 0 || cost(i) > cost(far)) far = i;
      }
      --counts[static_cast<std::size_t>(out.labels[static_cast<std::size_t>(far)])];
      out.labels[static_cast<std::size_t>(far)] = j;
      counts[static_cast<std::size_t>(j)] = 1;
      cost(far) = 0.0;
      changed = true;
    }

    Matrix sums = Matrix::Zero(k, points.cols());
    for (Index i = 0; i < n; ++i) sums.row(out.labels[static_cast<std::size_t>(i)]) += points.row(i);
    for (Index j = 0; j < k; ++j) {
      out.centroids.row(j) = sums.row(j) / static_cast<double>(counts[static_cast<std::size_t>(j)]);
    }

    double objective = 0.0;
    for (Index i = 0; i < n; ++i) {
      objective += (points.row(i) - out.centroids.row(out.labels[static_cast<std::size_t>(i)])).squaredNorm();
    }
    out.objective_trace.push_back(objective);
    if (!changed) break;
  }
  return out;
}

Partitioning kmeans_partition(const Dataset& data, Index k, std::uint64_t seed, const KMeansOptions& options) {
  KMeansResult fit = kmeans(data.x(), k, seed, options);
  Partitioning p;
  p.clusters.resize(static_cast<std::size_t>(k));
  for (Index i = 0; i < data.size(); ++i) {
    p.clusters[static_cast<std::size_t>(fit.labels[static_cast<std::size_t>(i)])].push_back(i);
  }
  p.assigner = KMeansAssigner{std::move(fit.centroids)};
  return p;
}

}  // namespace ck
