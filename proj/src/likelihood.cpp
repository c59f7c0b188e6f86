#include "likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fpmode.hpp"

namespace ck::detail {

std::optional<Conditioned> condition(const Dataset& data, const KernelParams& p) {
  const FlushSubnormals guard;
  const Index n = data.size();
  Conditioned c;
  c.kernel = kernel_matrix(p, data.x(), data.x());
  Matrix cov = c.kernel;
  cov.diagonal().array() += p.sigma2_gamma;

  Eigen::LLT<Eigen::Ref<Matrix>> llt(cov);
  if (llt.info() != Eigen::Success) return std::nullopt;
  cov.triangularView<Eigen::StrictlyUpper>().setZero();
  c.chol = std::move(cov);
  const auto diag = c.chol.diagonal();
  if (!diag.allFinite() || (diag.array() <= 0.0).any()) return std::nullopt;

  const auto lower = c.chol.triangularView<Eigen::Lower>();
  c.whitened_ones = lower.solve(Vector::Ones(n));
  const Vector whitened_y = lower.solve(data.y());
  c.ones_quad = c.whitened_ones.squaredNorm();
  if (!(c.ones_quad > 0.0) || !std::isfinite(c.ones_quad)) return std::nullopt;

  c.mu_hat = c.whitened_ones.dot(whitened_y) / c.ones_quad;
  c.whitened_resid = whitened_y - c.mu_hat * c.whitened_ones;
  c.log_det = 2.0 * diag.array().log().sum();
  c.log_likelihood = -0.5 * c.whitened_resid.squaredNorm() - 0.5 * c.log_det -
                     0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  if (!std::isfinite(c.log_likelihood)) return std::nullopt;
  return c;
}

KernelParams ParamLayout::unpack(const Eigen::Ref<const Vector>& log_params, double fixed_nugget) const {
  KernelParams p;
  p.theta = isotropic ? Vector::Constant(dim, std::exp(log_params(0)))
                      : Vector(log_params.head(dim).array().exp());
  p.sigma2_eps = std::exp(log_params(theta_count()));
  p.sigma2_gamma = with_nugget ? std::exp(log_params(theta_count() + 1)) : fixed_nugget;
  return p;
}

Vector ParamLayout::pack(const KernelParams& p) const {
  Vector v(size());
  if (isotropic) {
    v(0) = std::log(p.theta(0));
  } else {
    v.head(dim) = p.theta.array().log();
  }
  v(theta_count()) = std::log(p.sigma2_eps);
  if (with_nugget) v(theta_count() + 1) = std::log(p.sigma2_gamma);
  return v;
}

std::optional<double> log_likelihood_with_gradient(const Dataset& data, const ParamLayout& layout,
                                                   const Eigen::Ref<const Vector>& log_params,
                                                   double fixed_nugget, Vector* gradient) {
  if (!log_params.allFinite()) return std::nullopt;
  const FlushSubnormals guard;
  const KernelParams p = layout.unpack(log_params, fixed_nugget);
  auto c = condition(data, p);
  if (!c) return std::nullopt;
  if (gradient == nullptr) return c->log_likelihood;

  // d logL / d phi = 1/2 tr((alpha alpha^T - K^-1) dK/dphi), with mu_hat held at
  // its profile optimum.
  const Index n = data.size();
  const auto upper = c->chol.transpose().triangularView<Eigen::Upper>();
  const Vector alpha = upper.solve(c->whitened_resid);
  Matrix m = Matrix::Identity(n, n);
  c->chol.triangularView<Eigen::Lower>().solveInPlace(m);
  upper.solveInPlace(m);
  const double w_trace = alpha.squaredNorm() - m.trace();
  m = -m;
  m.noalias() += alpha * alpha.transpose();
  m.array() *= c->kernel.array();

  gradient->resize(layout.size());
  gradient->setZero();
  // sum_ij M_ij (x_i - x_j)^2 = 2 (x^T diag(M 1) x - x^T M x) for symmetric M
  const Vector row_sums = m.rowwise().sum();
  for (Index k = 0; k < layout.dim; ++k) {
    const auto xk = data.x().col(k);
    const double spread = 2.0 * (xk.cwiseAbs2().dot(row_sums) - xk.dot(m * xk));
    const double g = -0.5 * p.theta(k) * spread;
    (*gradient)(layout.isotropic ? 0 : k) += g;
  }
  (*gradient)(layout.theta_count()) = 0.5 * m.sum();
  if (layout.with_nugget) (*gradient)(layout.theta_count() + 1) = 0.5 * p.sigma2_gamma * w_trace;
  return c->log_likelihood;
}

}  // namespace ck::detail
