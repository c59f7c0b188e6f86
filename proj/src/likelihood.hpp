#pragma once

// Internal likelihood machinery shared by the fitter and the tests.

#include <optional>

#include <Eigen/Cholesky>

#include "clusterkriging/dataset.hpp"
#include "clusterkriging/kernel.hpp"

namespace ck::detail {

/// Everything derived from one Cholesky factorization of Sigma + sigma2_gamma I.
struct Conditioned {
  Matrix kernel;          // Sigma, without the nugget
  Matrix chol;            // lower factor L
  Vector whitened_ones;   // L^-1 1
  Vector whitened_resid;  // L^-1 (y - mu_hat 1)
  double ones_quad = 0;   // 1^T K^-1 1
  double mu_hat = 0;
  double log_det = 0;
  double log_likelihood = 0;
};

/// nullopt when the covariance is not numerically positive definite.
std::optional<Conditioned> condition(const Dataset& data, const KernelParams& p);

/// Maps between KernelParams and the optimizer's vector of log-parameters:
/// [log theta (1 or d entries), log sigma2_eps, (log sigma2_gamma)].
struct ParamLayout {
  Index dim = 1;
  bool isotropic = false;
  bool with_nugget = false;

  Index theta_count() const noexcept { return isotropic ? 1 : dim; }
  Index size() const noexcept { return theta_count() + 1 + (with_nugget ? 1 : 0); }

  KernelParams unpack(const Eigen::Ref<const Vector>& log_params, double fixed_nugget) const;
  Vector pack(const KernelParams& p) const;
};

/// Log likelihood at `log_params` and its gradient with respect to them.
/// nullopt when the factorization fails.
std::optional<double> log_likelihood_with_gradient(const Dataset& data, const ParamLayout& layout,
                                                   const Eigen::Ref<const Vector>& log_params,
                                                   double fixed_nugget, Vector* gradient);

}  // namespace ck::detail
