#pragma once

#include <cstdint>
#include <vector>

#include "clusterkriging/dataset.hpp"

namespace ck {

struct EvalReport {
  double r2 = 0.0;
  double smse = 0.0;
  double msll = 0.0;
  double fit_time_s = 0.0;
  double predict_time_s = 0.0;
};

/// 1 - SSE / SST. Throws MetricError for constant y_true.
double r2_score(const Eigen::Ref<const Vector>& y_true, const Eigen::Ref<const Vector>& y_pred);

/// Mean squared error over the (population) variance of y_true.
double smse(const Eigen::Ref<const Vector>& y_true, const Eigen::Ref<const Vector>& y_pred);

enum class MsllForm {
  /// Gaussian negative log predictive density minus that of the trivial
  /// predictor N(train_mean, train_var).
  standard,
  /// 1/2 log(pi v + (y - m)^2 / v) minus the same expression for the trivial
  /// predictor, kept for comparison with older reported numbers.
  legacy_printed,
};

/// Mean standardized log loss; negative is better than the trivial predictor.
double msll(const Eigen::Ref<const Vector>& y_true, const Eigen::Ref<const Vector>& pred_mean,
            const Eigen::Ref<const Vector>& pred_var, double train_mean, double train_var,
            MsllForm form = MsllForm::standard);

/// Fold id (0..folds-1) for each of n rows: a seeded shuffle cut into
/// contiguous chunks whose sizes differ by at most one.
std::vector<Index> kfold_split(Index n, Index folds, std::uint64_t seed);

}  // namespace ck
