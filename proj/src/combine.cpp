#include <cmath>
#include <string>

#include "clusterkriging/cluster_kriging.hpp"
#include "clusterkriging/error.hpp"

namespace ck {

namespace {

constexpr double kZeroVariance = 1e-12;

void require_shapes(const std::vector<Prediction>& predictions, Index rows, Index cols) {
  if (predictions.empty()) throw InputError("no predictions to combine");
  if (static_cast<Index>(predictions.size()) != cols) {
    throw InputError("weights have " + std::to_string(cols) + " columns for " + std::to_string(predictions.size()) +
                     " predictions");
  }
  for (const Prediction& p : predictions) {
    if (p.mean.size() != rows || p.variance.size() != rows) {
      throw InputError("prediction and weight row counts differ");
    }
  }
}

}  // namespace

Vector optimal_weights(const Eigen::Ref<const Vector>& variances) {
  if (variances.size() < 1) throw InputError("optimal_weights needs at least one variance");
  if ((variances.array() < 0.0).any() || !variances.allFinite()) {
    throw InputError("variances must be finite and non-negative");
  }
  const Index zeros = (variances.array() <= kZeroVariance).count();
  if (zeros > 0) {
    // Limit of the inverse-variance rule: the exact models share all weight.
    return (variances.array() <= kZeroVariance).cast<double>().matrix() / static_cast<double>(zeros);
  }
  const Vector precision = variances.cwiseInverse();
  return precision / precision.sum();
}

CombinedPrediction combine_optimal(const std::vector<Prediction>& predictions, const Eigen::Ref<const Matrix>& weights) {
  require_shapes(predictions, weights.rows(), weights.cols());
  MembershipMatrix{weights}.validate();
  CombinedPrediction out{Vector::Zero(weights.rows()), Vector::Zero(weights.rows()), weights, 0};
  for (std::size_t l = 0; l < predictions.size(); ++l) {
    const auto w = weights.col(static_cast<Index>(l)).array();
    out.mean.array() += w * predictions[l].mean.array();
    out.variance.array() += w.square() * predictions[l].variance.array();
  }
  out.variance = out.variance.cwiseMax(0.0);
  return out;
}

CombinedPrediction combine_membership(const std::vector<Prediction>& predictions,
                                      const MembershipMatrix& memberships) {
  const Matrix& weights = memberships.w;
  require_shapes(predictions, weights.rows(), weights.cols());
  memberships.validate();
  CombinedPrediction out{Vector::Zero(weights.rows()), Vector::Zero(weights.rows()), weights, 0};
  for (std::size_t l = 0; l < predictions.size(); ++l) {
    out.mean.array() += weights.col(static_cast<Index>(l)).array() * predictions[l].mean.array();
  }
  // sum w (s^2 + m^2) - mean^2, evaluated in its centered form
  // sum w (s^2 + (m - mean)^2), which is exact for one-hot weights.
  for (std::size_t l = 0; l < predictions.size(); ++l) {
    const auto w = weights.col(static_cast<Index>(l)).array();
    out.variance.array() +=
        w * (predictions[l].variance.array() + (predictions[l].mean.array() - out.mean.array()).square());
  }
  out.variance = out.variance.cwiseMax(0.0);
  return out;
}

}  // namespace ck
