#include <cmath>
#include <string>

#include "clusterkriging/error.hpp"
#include "clusterkriging/partition.hpp"
#include "clusterkriging/random.hpp"

namespace ck {

namespace {

double fcm_objective(const Eigen::Ref<const Matrix>& points, const Matrix& w, const Matrix& centroids, double m) {
  double total = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index j = 0; j < centroids.rows(); ++j) {
      total += std::pow(w(i, j), m) * (points.row(i) - centroids.row(j)).squaredNorm();
    }
  }
  return total;
}

}  // namespace

MembershipMatrix fcm_membership_at(const Eigen::Ref<const Matrix>& points, const Eigen::Ref<const Matrix>& centroids,
                                   double fuzzifier) {
  if (!(fuzzifier > 1.0)) throw ParameterError("fuzzifier must exceed 1");
  require_dim(points, centroids.cols(), "fcm points");
  const Index n = points.rows();
  const Index k = centroids.rows();
  const double exponent = 1.0 / (fuzzifier - 1.0);  // applied to squared distances

  MembershipMatrix out{Matrix::Zero(n, k)};
  Vector d2(k);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < k; ++j) d2(j) = (points.row(i) - centroids.row(j)).squaredNorm();
    const Index zeros = (d2.array() == 0.0).count();
    if (zeros > 0) {
      for (Index j = 0; j < k; ++j) out.w(i, j) = d2(j) == 0.0 ? 1.0 / static_cast<double>(zeros) : 0.0;
      continue;
    }
    for (Index j = 0; j < k; ++j) {
      double denom = 0.0;
      for (Index c = 0; c < k; ++c) denom += std::pow(d2(j) / d2(c), exponent);
      out.w(i, j) = 1.0 / denom;
    }
  }
  return out;
}

FcmResult fcm_memberships(const Dataset& data, Index k, double fuzzifier, std::uint64_t seed,
                          const FcmOptions& options) {
  const Index n = data.size();
  if (k < 1) throw ParameterError("fuzzy c-means needs k >= 1");
  if (k > n) throw ParameterError("fuzzy c-means: k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
  if (!(fuzzifier > 1.0)) throw ParameterError("fuzzifier must exceed 1");
  const auto& x = data.x();

  Rng rng(seed);
  const IndexSet picks = sample_without_replacement(n, k, rng);
  FcmResult out;
  out.centroids.resize(k, x.cols());
  for (Index j = 0; j < k; ++j) out.centroids.row(j) = x.row(picks[static_cast<std::size_t>(j)]);
  out.memberships = fcm_membership_at(x, out.centroids, fuzzifier);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const Matrix wm = out.memberships.w.array().pow(fuzzifier).matrix();
    for (Index j = 0; j < k; ++j) {
      const double mass = wm.col(j).sum();
      if (mass > 0.0) out.centroids.row(j) = (wm.col(j).transpose() * x) / mass;
    }
    MembershipMatrix next = fcm_membership_at(x, out.centroids, fuzzifier);
    const double change = (next.w - out.memberships.w).cwiseAbs().maxCoeff();
    out.memberships = std::move(next);
    out.objective_trace.push_back(fcm_objective(x, out.memberships.w, out.centroids, fuzzifier));
    if (change < options.tolerance) break;
  }
  return out;
}

}  // namespace ck
