#pragma once

#include "clusterkriging/dataset.hpp"

namespace ck {

/// Hyper-parameters of the Gaussian (squared exponential) covariance
///
///   k(x, x') = sigma2_eps * prod_i exp(-theta_i (x_i - x'_i)^2)
///
/// plus the homoscedastic nugget sigma2_gamma added to the diagonal of the
/// training covariance. Values are stored on their natural scale; the
/// optimizer works on logarithms internally.
struct KernelParams {
  Vector theta;               // per-dimension weights, 1/input-unit^2, all > 0
  double sigma2_eps = 1.0;    // process variance, > 0
  double sigma2_gamma = 0.0;  // nugget variance, >= 0

  Index dim() const noexcept { return theta.size(); }

  /// Throws ParameterError when any invariant is violated.
  void validate() const;

  static KernelParams isotropic(Index dim, double theta, double sigma2_eps, double sigma2_gamma = 0.0);
};

/// Covariance between two points.
double kernel_eval(const KernelParams& p, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& x_prime);

/// Covariance between every row of `a` and every row of `b` (no nugget).
Matrix kernel_matrix(const KernelParams& p, const Eigen::Ref<const Matrix>& a,
                     const Eigen::Ref<const Matrix>& b);

/// Covariance between the rows of `points` and a single point `x`.
Vector kernel_vector(const KernelParams& p, const Eigen::Ref<const Matrix>& points,
                     const Eigen::Ref<const Vector>& x);

}  // namespace ck
