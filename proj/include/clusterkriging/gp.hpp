#pragma once

#include <cstdint>
#include <optional>

#include "clusterkriging/dataset.hpp"
#include "clusterkriging/kernel.hpp"

namespace ck {

enum class NuggetMode {
  fixed,          // sigma2_gamma held at FitConfig::nugget
  optimized,      // log sigma2_gamma optimized jointly with theta and sigma2_eps
  auto_escalate,  // start at FitConfig::nugget, x10 on factorization failure up to max_nugget
};

struct FitConfig {
  double log_theta_lower = -10.0;
  double log_theta_upper = 10.0;
  int restarts = 5;
  int max_iterations = 60;
  NuggetMode nugget_mode = NuggetMode::auto_escalate;
  double nugget = 1e-10;
  double max_nugget = 1e-2;
  /// One shared length-scale weight for all input dimensions.
  bool isotropic = false;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Posterior mean and variance per query point.
struct Prediction {
  Vector mean;
  Vector variance;
};

/// An Ordinary Kriging model conditioned on a dataset. Immutable once built;
/// predict() is safe to call concurrently.
class KrigingModel {
 public:
  /// Conditions on `data` with fixed hyper-parameters (no fitting).
  /// Throws ConditioningError when Sigma + sigma2_gamma I is not positive definite.
  static KrigingModel condition(Dataset data, KernelParams params);

  const Dataset& data() const noexcept { return data_; }
  const KernelParams& params() const noexcept { return params_; }
  /// Lower Cholesky factor of Sigma + sigma2_gamma I.
  const Matrix& chol() const noexcept { return chol_; }
  /// (Sigma + sigma2_gamma I)^-1 (y - mu_hat 1)
  const Vector& alpha() const noexcept { return alpha_; }
  /// (Sigma + sigma2_gamma I)^-1 1
  const Vector& beta() const noexcept { return beta_; }
  double mu_hat() const noexcept { return mu_hat_; }
  double log_likelihood() const noexcept { return log_likelihood_; }

  Prediction predict(const Eigen::Ref<const Matrix>& queries) const;
  /// Mean and variance at a single query point.
  std::pair<double, double> predict_point(const Eigen::Ref<const Vector>& query) const;

 private:
  KrigingModel() = default;

  Dataset data_;
  KernelParams params_;
  Matrix chol_;
  Vector alpha_;
  Vector beta_;
  Vector whitened_ones_;  // L^-1 1
  double ones_quad_ = 0.0;  // 1^T (Sigma + sigma2_gamma I)^-1 1
  double mu_hat_ = 0.0;
  double log_likelihood_ = 0.0;
};

/// Maximum-likelihood fit of theta, sigma2_eps (and optionally the nugget)
/// by multi-start L-BFGS over log-parameters. Deterministic given config.seed.
KrigingModel fit(const Dataset& data, const FitConfig& config = {});

/// Gaussian log marginal likelihood with the trend profiled out:
///   -1/2 r^T K^-1 r - 1/2 log det K - n/2 log 2pi,  r = y - mu_hat 1,
///   K = Sigma + sigma2_gamma I.
double log_marginal_likelihood(const Dataset& data, const KernelParams& p);

}  // namespace ck
