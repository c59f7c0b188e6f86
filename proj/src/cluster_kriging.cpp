#include "clusterkriging/cluster_kriging.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "clusterkriging/error.hpp"
#include "clusterkriging/random.hpp"
#include "parallel.hpp"

namespace ck {

namespace {

constexpr std::array<std::pair<Flavor, std::string_view>, 6> kFlavorNames{{
    {Flavor::owck, "owck"},
    {Flavor::owfck, "owfck"},
    {Flavor::gmmck, "gmmck"},
    {Flavor::mtck, "mtck"},
    {Flavor::sod, "sod"},
    {Flavor::full, "full"},
}};

constexpr std::uint64_t kPartitionStream = 0x5eed0001;
constexpr std::uint64_t kSubsetStream = 0x5eed0002;

Partitioning make_partitioning(const Dataset& data, const ClusterKrigingConfig& config) {
  const Index n = data.size();
  const Index k = config.clusters > 0 ? config.clusters : recommended_cluster_count(n);
  const std::uint64_t seed = derive_seed(config.seed, kPartitionStream);

  switch (config.flavor) {
    case Flavor::owck: {
      KMeansOptions options;
      options.plus_plus = config.kmeans_plus_plus;
      return kmeans_partition(data, k, seed, options);
    }
    case Flavor::owfck: {
      FcmResult fcm = fcm_memberships(data, k, config.fuzzifier, seed);
      Partitioning p = overlap_assign(fcm.memberships, config.overlap);
      p.assigner = FcmAssigner{std::move(fcm.centroids), config.fuzzifier};
      return p;
    }
    case Flavor::gmmck: {
      const CovarianceType cov = config.gmm_covariance.value_or(data.dim() <= 10 ? CovarianceType::full
                                                                               : CovarianceType::diagonal);
      GmmOptions options;
      options.overlap = config.overlap;
      return gmm_fit(data, k, cov, seed, options).partitioning;
    }
    case Flavor::mtck: {
      const Index min_leaf = config.min_leaf_size > 0 ? config.min_leaf_size : std::max<Index>(2, n / (2 * k));
      return tree_partition(data, k, min_leaf).partitioning;
    }
    case Flavor::sod: {
      if (config.subset_size < 2) throw ParameterError("subset size must be at least 2");
      Partitioning p;
      Rng rng(derive_seed(config.seed, kSubsetStream));
      IndexSet rows = sample_without_replacement(n, std::min(n, config.subset_size), rng);
      std::sort(rows.begin(), rows.end());
      p.clusters.push_back(std::move(rows));
      return p;
    }
    case Flavor::full: {
      Partitioning p;
      p.clusters.emplace_back(static_cast<std::size_t>(n));
      for (Index i = 0; i < n; ++i) p.clusters[0][static_cast<std::size_t>(i)] = i;
      return p;
    }
  }
  throw ParameterError("unknown flavor");
}

}  // namespace

std::string_view to_string(Flavor flavor) noexcept {
  for (const auto& [f, name] : kFlavorNames) {
    if (f == flavor) return name;
  }
  return "unknown";
}

Flavor parse_flavor(std::string_view name) {
  for (const auto& [f, n] : kFlavorNames) {
    if (n == name) return f;
  }
  throw ParameterError("unknown flavor '" + std::string(name) + "' (expected owck|owfck|gmmck|mtck|sod|full)");
}

Combiner combiner_for(Flavor flavor) noexcept {
  switch (flavor) {
    case Flavor::owck:
    case Flavor::owfck:
      return Combiner::optimal;
    case Flavor::gmmck:
      return Combiner::membership;
    default:
      return Combiner::single_model;
  }
}

Index recommended_cluster_count(Index n) noexcept { return std::max<Index>(1, (n + 999) / 1000); }

std::uint64_t cluster_seed(std::uint64_t seed, Index cluster) noexcept {
  return derive_seed(seed, 0x10000 + static_cast<std::uint64_t>(cluster));
}

ClusterKrigingModel::ClusterKrigingModel(Flavor flavor, Dataset training, Partitioning partitioning,
                                         std::vector<KrigingModel> models)
    : flavor_(flavor), training_(std::move(training)), partitioning_(std::move(partitioning)),
      models_(std::move(models)) {
  if (models_.empty() || static_cast<Index>(models_.size()) != partitioning_.k()) {
    throw InputError("cluster model count does not match the partitioning");
  }
  const bool routed = flavor_ == Flavor::mtck || flavor_ == Flavor::gmmck;
  if (flavor_ == Flavor::mtck && !std::holds_alternative<RegressionTree>(partitioning_.assigner)) {
    throw InputError("mtck needs a regression tree assigner");
  }
  if (flavor_ == Flavor::gmmck && !std::holds_alternative<GaussianMixture>(partitioning_.assigner)) {
    throw InputError("gmmck needs a Gaussian mixture assigner");
  }
  if (!routed && combiner() == Combiner::single_model && models_.size() != 1) {
    throw InputError("single-model flavors carry exactly one model");
  }
  if (flavor_ == Flavor::mtck &&
      std::get<RegressionTree>(partitioning_.assigner).leaf_count() != partitioning_.k()) {
    throw InputError("tree leaf count does not match the partitioning");
  }
}

ClusterKrigingModel ck_fit(const Dataset& data, const ClusterKrigingConfig& config) {
  config.fit.validate();
  Partitioning partitioning = make_partitioning(data, config);
  for (Index l = 0; l < partitioning.k(); ++l) {
    const auto size = partitioning.clusters[static_cast<std::size_t>(l)].size();
    if (size < 2) {
      throw ParameterError("cluster " + std::to_string(l) + " has " + std::to_string(size) +
                           " point(s); every cluster needs at least 2");
    }
  }

  std::vector<std::optional<KrigingModel>> fitted(static_cast<std::size_t>(partitioning.k()));
  detail::parallel_for(fitted.size(), config.threads, [&](std::size_t l) {
    FitConfig fc = config.fit;
    fc.seed = cluster_seed(config.seed, static_cast<Index>(l));
    fitted[l] = fit(data.subset(partitioning.clusters[l]), fc);
  });

  std::vector<KrigingModel> models;
  models.reserve(fitted.size());
  for (auto& m : fitted) models.push_back(std::move(*m));
  return ClusterKrigingModel(config.flavor, data, std::move(partitioning), std::move(models));
}

CombinedPrediction ClusterKrigingModel::predict(const Eigen::Ref<const Matrix>& queries, int threads) const {
  require_dim(queries, training_.dim(), "query points");
  const Index m = queries.rows();
  const Index k = this->k();

  if (combiner() == Combiner::single_model) {
    std::vector<Index> route(static_cast<std::size_t>(m), 0);
    if (flavor_ == Flavor::mtck) route = tree_route(std::get<RegressionTree>(partitioning_.assigner), queries);
    CombinedPrediction out{Vector(m), Vector(m), Matrix::Zero(m, k), static_cast<std::size_t>(m)};
    detail::parallel_for(static_cast<std::size_t>(m), threads, [&](std::size_t i) {
      const Index q = static_cast<Index>(i);
      const Index l = route[i];
      const auto [mean, variance] = models_[static_cast<std::size_t>(l)].predict_point(queries.row(q).transpose());
      out.mean(q) = mean;
      out.variance(q) = variance;
      out.weights(q, l) = 1.0;
    });
    return out;
  }

  std::vector<Prediction> local(static_cast<std::size_t>(k));
  detail::parallel_for(local.size(), threads, [&](std::size_t l) { local[l] = models_[l].predict(queries); });

  CombinedPrediction out;
  if (combiner() == Combiner::optimal) {
    Matrix weights(m, k);
    Vector variances(k);
    for (Index i = 0; i < m; ++i) {
      for (Index l = 0; l < k; ++l) variances(l) = local[static_cast<std::size_t>(l)].variance(i);
      weights.row(i) = optimal_weights(variances).transpose();
    }
    out = combine_optimal(local, weights);
  } else {
    out = combine_membership(local, gmm_membership(std::get<GaussianMixture>(partitioning_.assigner), queries));
  }
  out.posterior_evaluations = static_cast<std::size_t>(m * k);
  return out;
}

}  // namespace ck
