#include "clusterkriging/metrics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "clusterkriging/error.hpp"
#include "clusterkriging/random.hpp"

namespace ck {

namespace {

void require_pair(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b, const char* what) {
  if (a.size() != b.size()) throw InputError(std::string(what) + ": length mismatch");
  if (a.size() < 2) throw InputError(std::string(what) + ": needs at least two values");
  if (!a.allFinite() || !b.allFinite()) throw InputError(std::string(what) + ": non-finite input");
}

// Sum of squared deviations from the mean; throws when it is zero.
double total_sum_of_squares(const Eigen::Ref<const Vector>& y, const char* what) {
  const double mean = y.mean();
  const double sst = (y.array() - mean).matrix().squaredNorm();
  if (!(sst > 0.0)) throw MetricError(std::string(what) + " is undefined for constant targets");
  return sst;
}

}  // namespace

double r2_score(const Eigen::Ref<const Vector>& y_true, const Eigen::Ref<const Vector>& y_pred) {
  require_pair(y_true, y_pred, "r2_score");
  const double sst = total_sum_of_squares(y_true, "r2_score");
  return 1.0 - (y_true - y_pred).squaredNorm() / sst;
}

double smse(const Eigen::Ref<const Vector>& y_true, const Eigen::Ref<const Vector>& y_pred) {
  require_pair(y_true, y_pred, "smse");
  const double n = static_cast<double>(y_true.size());
  const double variance = total_sum_of_squares(y_true, "smse") / n;
  return ((y_true - y_pred).squaredNorm() / n) / variance;
}

double msll(const Eigen::Ref<const Vector>& y_true, const Eigen::Ref<const Vector>& pred_mean,
            const Eigen::Ref<const Vector>& pred_var, double train_mean, double train_var, MsllForm form) {
  if (y_true.size() != pred_mean.size() || y_true.size() != pred_var.size()) {
    throw InputError("msll: length mismatch");
  }
  if (y_true.size() < 1) throw InputError("msll: needs at least one value");
  if (!(train_var > 0.0)) throw InputError("msll: trivial variance must be positive");
  if (!(pred_var.array() > 0.0).all()) throw InputError("msll: predicted variances must be positive");

  auto loss = [form](double y, double m, double v) {
    const double r2 = (y - m) * (y - m);
    if (form == MsllForm::legacy_printed) return 0.5 * std::log(std::numbers::pi * v + r2 / v);
    return 0.5 * std::log(2.0 * std::numbers::pi * v) + r2 / (2.0 * v);
  };
  double total = 0.0;
  for (Index i = 0; i < y_true.size(); ++i) {
    total += loss(y_true(i), pred_mean(i), pred_var(i)) - loss(y_true(i), train_mean, train_var);
  }
  return total / static_cast<double>(y_true.size());
}

std::vector<Index> kfold_split(Index n, Index folds, std::uint64_t seed) {
  if (folds < 2) throw ParameterError("k-fold split needs at least 2 folds");
  if (folds > n) {
    throw ParameterError("cannot split " + std::to_string(n) + " rows into " + std::to_string(folds) + " folds");
  }
  Rng rng(seed);
  const IndexSet order = permutation(n, rng);
  std::vector<Index> fold(static_cast<std::size_t>(n));
  const Index base = n / folds;
  const Index extra = n % folds;
  Index pos = 0;
  for (Index f = 0; f < folds; ++f) {
    const Index size = base + (f < extra ? 1 : 0);
    for (Index j = 0; j < size; ++j) fold[static_cast<std::size_t>(order[static_cast<std::size_t>(pos++)])] = f;
  }
  return fold;
}

}  // namespace ck
