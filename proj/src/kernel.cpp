#include "clusterkriging/kernel.hpp"

#include <cmath>
#include <string>

#include "clusterkriging/error.hpp"

namespace ck {

void KernelParams::validate() const {
  if (theta.size() < 1) throw ParameterError("kernel theta must have at least one entry");
  for (Index i = 0; i < theta.size(); ++i) {
    if (!(theta(i) > 0.0) || !std::isfinite(theta(i))) {
      throw ParameterError("kernel theta[" + std::to_string(i) + "] must be positive and finite");
    }
  }
  if (!(sigma2_eps > 0.0) || !std::isfinite(sigma2_eps)) {
    throw ParameterError("process variance must be positive and finite");
  }
  if (!(sigma2_gamma >= 0.0) || !std::isfinite(sigma2_gamma)) {
    throw ParameterError("nugget variance must be non-negative and finite");
  }
}

KernelParams KernelParams::isotropic(Index dim, double theta, double sigma2_eps, double sigma2_gamma) {
  KernelParams p{Vector::Constant(dim, theta), sigma2_eps, sigma2_gamma};
  p.validate();
  return p;
}

double kernel_eval(const KernelParams& p, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& x_prime) {
  if (x.size() != p.dim() || x_prime.size() != p.dim()) {
    throw InputError("kernel_eval: points have dimension " + std::to_string(x.size()) + " and " +
                     std::to_string(x_prime.size()) + ", kernel expects " + std::to_string(p.dim()));
  }
  const double weighted = (p.theta.array() * (x - x_prime).array().square()).sum();
  return p.sigma2_eps * std::exp(-weighted);
}

Matrix kernel_matrix(const KernelParams& p, const Eigen::Ref<const Matrix>& a,
                     const Eigen::Ref<const Matrix>& b) {
  require_dim(a, p.dim(), "kernel_matrix: first point set");
  require_dim(b, p.dim(), "kernel_matrix: second point set");
  Matrix dist = Matrix::Zero(a.rows(), b.rows());
  for (Index k = 0; k < p.dim(); ++k) {
    const double w = p.theta(k);
    for (Index j = 0; j < b.rows(); ++j) {
      dist.col(j).array() += w * (a.col(k).array() - b(j, k)).square();
    }
  }
  return p.sigma2_eps * (-dist.array()).exp().matrix();
}

Vector kernel_vector(const KernelParams& p, const Eigen::Ref<const Matrix>& points,
                     const Eigen::Ref<const Vector>& x) {
  require_dim(points, p.dim(), "kernel_vector: point set");
  if (x.size() != p.dim()) throw InputError("kernel_vector: query dimension mismatch");
  Eigen::ArrayXd dist = Eigen::ArrayXd::Zero(points.rows());
  for (Index k = 0; k < p.dim(); ++k) {
    dist += p.theta(k) * (points.col(k).array() - x(k)).square();
  }
  return p.sigma2_eps * (-dist).exp().matrix();
}

}  // namespace ck
