#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "clusterkriging/dataset.hpp"

namespace ck {

/// n x k membership weights, each row on the probability simplex.
struct MembershipMatrix {
  Matrix w;

  Index rows() const noexcept { return w.rows(); }
  Index clusters() const noexcept { return w.cols(); }
  /// Throws InputError when an entry leaves [0, 1] or a row does not sum to 1.
  void validate(double tol = 1e-8) const;
};

struct KMeansAssigner {
  Matrix centroids;  // k x d
};

struct FcmAssigner {
  Matrix centroids;  // k x d
  double fuzzifier = 2.0;
};

enum class CovarianceType { full, diagonal };

/// Mixture of multivariate Gaussians. Immutable; factorizations are computed
/// once on construction.
class GaussianMixture {
 public:
  GaussianMixture(Vector weights, Matrix means, std::vector<Matrix> covariances, CovarianceType type);

  Index components() const noexcept { return weights_.size(); }
  Index dim() const noexcept { return means_.cols(); }
  const Vector& weights() const noexcept { return weights_; }
  const Matrix& means() const noexcept { return means_; }
  const std::vector<Matrix>& covariances() const noexcept { return covariances_; }
  CovarianceType covariance_type() const noexcept { return type_; }

  /// n x k matrix of log(weight_j) + log N(x_i | mean_j, cov_j).
  Matrix log_joint(const Eigen::Ref<const Matrix>& points) const;

 private:
  Vector weights_;
  Matrix means_;
  std::vector<Matrix> covariances_;
  CovarianceType type_;
  std::vector<Matrix> chol_;  // lower factors
  Vector log_norm_;           // -1/2 (d log 2pi + log det cov_j)
};

/// Axis-aligned binary regression tree. Rows with x[feature] <= threshold go left.
class RegressionTree {
 public:
  struct Node {
    Index feature = -1;  // -1 for a leaf
    double threshold = 0.0;
    Index left = -1;
    Index right = -1;
    Index leaf = -1;  // leaf number, -1 for an internal node
  };

  RegressionTree(std::vector<Node> nodes, Index dim);

  Index leaf_count() const noexcept { return leaves_; }
  Index dim() const noexcept { return dim_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

  Index route(const Eigen::Ref<const Vector>& point) const;

 private:
  std::vector<Node> nodes_;
  Index dim_ = 0;
  Index leaves_ = 0;
};

/// Nothing to route with: the partition carries a single model (SoD, full).
struct NoAssigner {};

using Assigner = std::variant<NoAssigner, KMeansAssigner, FcmAssigner, GaussianMixture, RegressionTree>;

/// k index sets over the rows of a dataset plus what is needed to place
/// unseen points at prediction time. Index sets are sorted ascending.
struct Partitioning {
  std::vector<IndexSet> clusters;
  Assigner assigner = NoAssigner{};

  Index k() const noexcept { return static_cast<Index>(clusters.size()); }
};

// ---------------------------------------------------------------- k-means

struct KMeansOptions {
  bool plus_plus = false;
  int max_iterations = 300;
};

struct KMeansResult {
  Matrix centroids;
  std::vector<Index> labels;
  /// Within-cluster sum of squares after each Lloyd iteration.
  std::vector<double> objective_trace;
};

KMeansResult kmeans(const Eigen::Ref<const Matrix>& points, Index k, std::uint64_t seed,
                    const KMeansOptions& options = {});

/// Disjoint clusters from Lloyd's algorithm.
Partitioning kmeans_partition(const Dataset& data, Index k, std::uint64_t seed,
                              const KMeansOptions& options = {});

// -------------------------------------------------------- fuzzy c-means

struct FcmOptions {
  double tolerance = 1e-5;
  int max_iterations = 300;
};

struct FcmResult {
  MembershipMatrix memberships;
  Matrix centroids;
  std::vector<double> objective_trace;
};

/// Alternating membership/centroid updates of fuzzy c-means. The returned
/// memberships are evaluated at the returned centroids.
FcmResult fcm_memberships(const Dataset& data, Index k, double fuzzifier, std::uint64_t seed,
                          const FcmOptions& options = {});

/// Memberships of arbitrary points for fixed centroids. A point that coincides
/// with a centroid gets membership 1 there (split evenly if centroids coincide).
MembershipMatrix fcm_membership_at(const Eigen::Ref<const Matrix>& points, const Eigen::Ref<const Matrix>& centroids,
                                   double fuzzifier);

// ------------------------------------------------------------- overlap

/// Number of members per soft cluster: min(n, round_half_up(n * o / k)).
Index soft_cluster_size(Index n, Index k, double overlap);

/// For each cluster, the soft_cluster_size rows with the largest membership
/// (ties to the lower row index). Rows left uncovered are added to their
/// argmax cluster. Overlap must lie in [1, 2].
Partitioning overlap_assign(const MembershipMatrix& memberships, double overlap);

// ----------------------------------------------------------- mixtures

struct GmmOptions {
  double tolerance = 1e-6;  // relative log-likelihood improvement
  int max_iterations = 300;
  double overlap = 1.0;
};

struct GmmResult {
  GaussianMixture model;
  Partitioning partitioning;
  MembershipMatrix responsibilities;
  std::vector<double> log_likelihood_trace;
};

GmmResult gmm_fit(const Dataset& data, Index k, CovarianceType covariance, std::uint64_t seed,
                  const GmmOptions& options = {});

/// Posterior component probabilities of each query point.
MembershipMatrix gmm_membership(const GaussianMixture& model, const Eigen::Ref<const Matrix>& points);

// -------------------------------------------------------------- trees

struct TreeResult {
  RegressionTree tree;
  Partitioning partitioning;
};

/// Best-first growth of a variance-reduction regression tree on (X, y) up to
/// `max_leaves` leaves, each holding at least `min_leaf_size` rows.
TreeResult tree_partition(const Dataset& data, Index max_leaves, Index min_leaf_size);

std::vector<Index> tree_route(const RegressionTree& tree, const Eigen::Ref<const Matrix>& points);

}  // namespace ck
