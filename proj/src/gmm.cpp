#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>

#include "clusterkriging/error.hpp"
#include "clusterkriging/partition.hpp"
#include "clusterkriging/random.hpp"

namespace ck {

namespace {

constexpr double kCollapseLogDet = -690.7755278982137;  // log(1e-300)
constexpr double kReseedJitter = 1e-6;

// Lower Cholesky factor, or an empty matrix when cov is not positive
// definite or its determinant has collapsed.
Matrix checked_factor(const Matrix& cov) {
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) return {};
  Matrix l = llt.matrixL();
  if ((l.diagonal().array() <= 0.0).any()) return {};
  if (2.0 * l.diagonal().array().log().sum() < kCollapseLogDet) return {};
  return l;
}

Vector log_sum_exp_rows(const Matrix& m) {
  Vector out(m.rows());
  for (Index i = 0; i < m.rows(); ++i) {
    const double top = m.row(i).maxCoeff();
    out(i) = top + std::log((m.row(i).array() - top).exp().sum());
  }
  return out;
}

Matrix responsibilities_from(const Matrix& log_joint, const Vector& log_norm) {
  return (log_joint.colwise() - log_norm).array().exp().matrix();
}

Matrix sample_covariance(const Matrix& x) {
  const Matrix centered = x.rowwise() - x.colwise().mean();
  return centered.transpose() * centered / static_cast<double>(x.rows());
}

}  // namespace

GaussianMixture::GaussianMixture(Vector weights, Matrix means, std::vector<Matrix> covariances, CovarianceType type)
    : weights_(std::move(weights)), means_(std::move(means)), covariances_(std::move(covariances)), type_(type) {
  const Index k = weights_.size();
  if (k < 1 || means_.rows() != k || static_cast<Index>(covariances_.size()) != k) {
    throw InputError("mixture needs matching weights, means and covariances");
  }
  const Index d = means_.cols();
  log_norm_.resize(k);
  for (Index j = 0; j < k; ++j) {
    Matrix& cov = covariances_[static_cast<std::size_t>(j)];
    if (cov.rows() != d || cov.cols() != d) throw InputError("mixture covariance has the wrong shape");
    if (type_ == CovarianceType::diagonal) cov = Matrix(cov.diagonal().asDiagonal());
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw InputError("mixture covariance " + std::to_string(j) + " is not positive definite");
    }
    chol_.push_back(llt.matrixL());
    log_norm_(j) = -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) +
                           2.0 * chol_.back().diagonal().array().log().sum());
  }
  if ((weights_.array() < 0.0).any() || std::abs(weights_.sum() - 1.0) > 1e-8) {
    throw InputError("mixture weights must be non-negative and sum to one");
  }
}

Matrix GaussianMixture::log_joint(const Eigen::Ref<const Matrix>& points) const {
  require_dim(points, dim(), "mixture query points");
  Matrix out(points.rows(), components());
  for (Index j = 0; j < components(); ++j) {
    const Matrix centered = (points.rowwise() - means_.row(j)).transpose();
    const Matrix z = chol_[static_cast<std::size_t>(j)].triangularView<Eigen::Lower>().solve(centered);
    out.col(j) = (std::log(weights_(j)) + log_norm_(j)) - 0.5 * z.colwise().squaredNorm().transpose().array();
  }
  return out;
}

MembershipMatrix gmm_membership(const GaussianMixture& model, const Eigen::Ref<const Matrix>& points) {
  const Matrix lj = model.log_joint(points);
  return MembershipMatrix{responsibilities_from(lj, log_sum_exp_rows(lj))};
}

GmmResult gmm_fit(const Dataset& data, Index k, CovarianceType covariance, std::uint64_t seed,
                  const GmmOptions& options) {
  const Index n = data.size();
  const Index d = data.dim();
  if (k < 1) throw ParameterError("mixture needs k >= 1");
  if (k > n) throw ParameterError("mixture: k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
  const Matrix& x = data.x();
  Rng rng(derive_seed(seed, 1));

  // Hard k-means labels seed the first M-step.
  const KMeansResult init = kmeans(x, k, derive_seed(seed, 0));
  Matrix resp = Matrix::Zero(n, k);
  for (Index i = 0; i < n; ++i) resp(i, init.labels[static_cast<std::size_t>(i)]) = 1.0;

  Vector weights(k);
  Matrix means(k, d);
  std::vector<Matrix> covs(static_cast<std::size_t>(k));
  std::vector<double> trace;

  auto m_step = [&] {
    const Vector mass = resp.colwise().sum();
    for (Index j = 0; j < k; ++j) {
      Matrix& cov = covs[static_cast<std::size_t>(j)];
      if (mass(j) > 0.0) {
        means.row(j) = resp.col(j).transpose() * x / mass(j);
        const Matrix centered = x.rowwise() - means.row(j);
        cov = centered.transpose() * resp.col(j).asDiagonal() * centered / mass(j);
      } else {
        cov = Matrix::Zero(d, d);
      }
      if (covariance == CovarianceType::diagonal) cov = Matrix(cov.diagonal().asDiagonal());
      if (checked_factor(cov).size() == 0) {
        // Collapsed component: restart it on a random point with a small jitter.
        means.row(j) = x.row(rng.below(n));
        cov.diagonal().array() += kReseedJitter;
        if (checked_factor(cov).size() == 0) {
          cov = sample_covariance(x);
          if (covariance == CovarianceType::diagonal) cov = Matrix(cov.diagonal().asDiagonal());
          cov.diagonal().array() += kReseedJitter;
        }
      }
    }
    weights = mass / static_cast<double>(n);
    for (Index j = 0; j < k; ++j) weights(j) = std::max(weights(j), std::numeric_limits<double>::min());
    weights /= weights.sum();
  };

  m_step();
  double previous = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const GaussianMixture model(weights, means, covs, covariance);
    const Matrix lj = model.log_joint(x);
    const Vector norm = log_sum_exp_rows(lj);
    const double ll = norm.sum();
    trace.push_back(ll);
    resp = responsibilities_from(lj, norm);
    const bool converged = std::isfinite(previous) && std::abs(ll - previous) <= options.tolerance * std::abs(ll);
    previous = ll;
    if (converged) break;
    m_step();
  }

  GaussianMixture model(weights, means, covs, covariance);
  MembershipMatrix r = gmm_membership(model, x);
  Partitioning partitioning = overlap_assign(r, options.overlap);
  partitioning.assigner = model;
  return GmmResult{std::move(model), std::move(partitioning), std::move(r), std::move(trace)};
}

}  // namespace ck
