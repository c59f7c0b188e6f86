#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "clusterkriging/dataset.hpp"
#include "clusterkriging/gp.hpp"
#include "clusterkriging/partition.hpp"

namespace ck {

/// Partitioning + combination presets.
///   owck   k-means clusters, optimal (inverse-variance) weights
///   owfck  fuzzy c-means with overlap, optimal weights
///   gmmck  Gaussian mixture with overlap, membership-probability mixture
///   mtck   regression-tree leaves, the routed leaf model alone
///   sod    one model on a random subset
///   full   one model on all rows
enum class Flavor { owck, owfck, gmmck, mtck, sod, full };

enum class Combiner { optimal, membership, single_model };

std::string_view to_string(Flavor flavor) noexcept;
/// Throws ParameterError for unknown names.
Flavor parse_flavor(std::string_view name);
Combiner combiner_for(Flavor flavor) noexcept;

struct ClusterKrigingConfig {
  Flavor flavor = Flavor::owck;
  /// Cluster count (max leaves for mtck); 0 picks recommended_cluster_count(n).
  Index clusters = 0;
  FitConfig fit;
  /// Soft-cluster overlap factor in [1, 2]; 1.1 means 10% overlap.
  double overlap = 1.1;
  double fuzzifier = 2.0;
  /// Mixture covariance; unset means full for d <= 10, diagonal above.
  std::optional<CovarianceType> gmm_covariance;
  /// mtck minimum leaf size; 0 means max(2, n / (2k)).
  Index min_leaf_size = 0;
  /// sod subset size (capped at n).
  Index subset_size = 512;
  bool kmeans_plus_plus = false;
  /// Worker threads for per-cluster fitting and prediction.
  int threads = 1;
  std::uint64_t seed = 0;
};

/// Smallest k keeping clusters at or under 1000 rows (the 100-1000 rows per
/// cluster guidance).
Index recommended_cluster_count(Index n) noexcept;

/// Seed used for fitting the model of cluster `cluster`.
std::uint64_t cluster_seed(std::uint64_t seed, Index cluster) noexcept;

struct CombinedPrediction {
  Vector mean;
  Vector variance;
  Matrix weights;  // queries x k
  /// Number of single-point posterior evaluations performed.
  std::size_t posterior_evaluations = 0;
};

/// Inverse-variance weights; near-zero variances (<= 1e-12) share all the mass.
Vector optimal_weights(const Eigen::Ref<const Vector>& variances);

/// mean = sum w_l m_l, variance = sum w_l^2 s_l^2 (superposition of independent models).
CombinedPrediction combine_optimal(const std::vector<Prediction>& predictions, const Eigen::Ref<const Matrix>& weights);

/// Mixture of the local posteriors: mean = sum w_l m_l,
/// variance = sum w_l (s_l^2 + m_l^2) - mean^2.
CombinedPrediction combine_membership(const std::vector<Prediction>& predictions,
                                      const MembershipMatrix& memberships);

class ClusterKrigingModel {
 public:
  /// Assembles a model from fitted parts. models[l] must be conditioned on
  /// exactly training.subset(partitioning.clusters[l]).
  ClusterKrigingModel(Flavor flavor, Dataset training, Partitioning partitioning, std::vector<KrigingModel> models);

  Flavor flavor() const noexcept { return flavor_; }
  Combiner combiner() const noexcept { return combiner_for(flavor_); }
  const Dataset& training() const noexcept { return training_; }
  const Partitioning& partitioning() const noexcept { return partitioning_; }
  const std::vector<KrigingModel>& models() const noexcept { return models_; }
  Index k() const noexcept { return static_cast<Index>(models_.size()); }

  CombinedPrediction predict(const Eigen::Ref<const Matrix>& queries, int threads = 1) const;

 private:
  Flavor flavor_;
  Dataset training_;
  Partitioning partitioning_;
  std::vector<KrigingModel> models_;
};

/// Partitions `data` per the flavor and fits one model per cluster, each with
/// its own hyper-parameters. Results do not depend on config.threads.
ClusterKrigingModel ck_fit(const Dataset& data, const ClusterKrigingConfig& config);

inline CombinedPrediction ck_predict(const ClusterKrigingModel& model, const Eigen::Ref<const Matrix>& queries,
                                     int threads = 1) {
  return model.predict(queries, threads);
}

}  // namespace ck
