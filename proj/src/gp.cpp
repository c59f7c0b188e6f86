#include "clusterkriging/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>

#include "clusterkriging/error.hpp"
#include "clusterkriging/random.hpp"
#include "likelihood.hpp"

namespace ck {

namespace {

// Bounds for the log-parameters handled by the optimizer, enforced through a
// logistic reparameterization.
struct Box {
  Vector lower;
  Vector upper;

  Vector to_bounded(const double* u) const {
    Vector p(lower.size());
    for (Index i = 0; i < p.size(); ++i) p(i) = lower(i) + (upper(i) - lower(i)) / (1.0 + std::exp(-u[i]));
    return p;
  }

  Vector to_unbounded(const Vector& p) const {
    Vector u(p.size());
    for (Index i = 0; i < p.size(); ++i) {
      const double t = std::clamp((p(i) - lower(i)) / (upper(i) - lower(i)), 1e-9, 1.0 - 1e-9);
      u(i) = std::log(t / (1.0 - t));
    }
    return u;
  }
};

class NegativeLogLikelihood final : public ceres::FirstOrderFunction {
 public:
  NegativeLogLikelihood(const Dataset& data, detail::ParamLayout layout, Box box, double nugget)
      : data_(data), layout_(layout), box_(std::move(box)), nugget_(nugget) {}

  bool Evaluate(const double* u, double* cost, double* gradient) const override {
    const Vector p = box_.to_bounded(u);
    Vector g;
    const auto value = detail::log_likelihood_with_gradient(data_, layout_, p, nugget_,
                                                            gradient != nullptr ? &g : nullptr);
    if (!value) return false;
    *cost = -*value;
    if (gradient != nullptr) {
      if (!g.allFinite()) return false;
      for (Index i = 0; i < p.size(); ++i) {
        const double s = (p(i) - box_.lower(i)) / (box_.upper(i) - box_.lower(i));
        gradient[i] = -g(i) * (box_.upper(i) - box_.lower(i)) * s * (1.0 - s);
      }
    }
    return true;
  }

  int NumParameters() const override { return static_cast<int>(layout_.size()); }

 private:
  const Dataset& data_;
  detail::ParamLayout layout_;
  Box box_;
  double nugget_;
};

double variance_or_one(const Vector& y) {
  const double mean = y.mean();
  const double v = (y.array() - mean).square().mean();
  return v > 0.0 ? v : 1.0;
}

struct Candidate {
  Vector log_params;
  double log_likelihood = -std::numeric_limits<double>::infinity();
};

// One round of multi-start optimization at a fixed nugget (or with the
// nugget as a free parameter). Returns the best feasible optimum, if any.
std::optional<Candidate> multistart(const Dataset& data, const FitConfig& config, double nugget,
                                    std::vector<Vector>& tried) {
  detail::ParamLayout layout{data.dim(), config.isotropic, config.nugget_mode == NuggetMode::optimized};
  const Index nt = layout.theta_count();
  const double var_y = variance_or_one(data.y());

  Box box{Vector(layout.size()), Vector(layout.size())};
  box.lower.head(nt).setConstant(config.log_theta_lower);
  box.upper.head(nt).setConstant(config.log_theta_upper);
  box.lower(nt) = std::log(var_y) - 12.0;
  box.upper(nt) = std::log(var_y) + 12.0;
  if (layout.with_nugget) {
    box.lower(nt + 1) = std::log(1e-12 * var_y);
    box.upper(nt + 1) = std::log(var_y);
  }

  // Data-scaled starting window: theta_i ~ 1 / (2 d var(x_i)) puts the average
  // exponent near one; restarts spread uniformly over +-3 around it.
  Vector center(layout.size());
  const double dim = static_cast<double>(data.dim());
  for (Index i = 0; i < nt; ++i) {
    const Vector col = config.isotropic ? Vector(data.x().reshaped()) : Vector(data.x().col(i));
    const double mean = col.mean();
    double v = (col.array() - mean).square().mean();
    if (!(v > 0.0)) v = 1.0;
    center(i) = std::clamp(-std::log(2.0 * dim * v), config.log_theta_lower, config.log_theta_upper);
  }
  center(nt) = std::log(var_y);
  if (layout.with_nugget) center(nt + 1) = std::log(std::clamp(config.nugget, 1e-12 * var_y, var_y));

  ceres::GradientProblemSolver::Options options;
  options.line_search_direction_type = ceres::LBFGS;
  options.max_num_iterations = config.max_iterations;
  options.logging_type = ceres::SILENT;
  options.minimizer_progress_to_stdout = false;
  options.function_tolerance = 1e-9;
  options.gradient_tolerance = 1e-9;
  options.parameter_tolerance = 1e-10;

  std::optional<Candidate> best;
  for (int r = 0; r < config.restarts; ++r) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(r)));
    Vector start = center;
    if (r > 0) {
      for (Index i = 0; i < nt; ++i) {
        start(i) = std::clamp(center(i) + rng.uniform(-3.0, 3.0), config.log_theta_lower,
                              config.log_theta_upper);
      }
      start(nt) = center(nt) + rng.uniform(-1.0, 1.0);
    }
    tried.push_back(start);

    Vector u = box.to_unbounded(start);
    ceres::GradientProblem problem(new NegativeLogLikelihood(data, layout, box, nugget));
    ceres::GradientProblemSolver::Summary summary;
    ceres::Solve(options, problem, u.data(), &summary);

    const Vector p = box.to_bounded(u.data());
    const auto value = detail::log_likelihood_with_gradient(data, layout, p, nugget, nullptr);
    if (!value) continue;
    if (!best || *value > best->log_likelihood) best = Candidate{p, *value};
  }
  return best;
}

bool has_duplicate_rows(const Matrix& x) {
  std::vector<Index> order(static_cast<std::size_t>(x.rows()));
  for (Index i = 0; i < x.rows(); ++i) order[static_cast<std::size_t>(i)] = i;
  auto row_less = [&](Index a, Index b) {
    for (Index k = 0; k < x.cols(); ++k) {
      if (x(a, k) != x(b, k)) return x(a, k) < x(b, k);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), row_less);
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (!row_less(order[i - 1], order[i])) return true;
  }
  return false;
}

std::string describe_theta(const std::vector<Vector>& tried) {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < tried.size(); ++i) {
    if (i > 0) out << "; ";
    const Vector t = tried[i].array().exp();
    for (Index k = 0; k < t.size(); ++k) out << (k > 0 ? "," : "") << t(k);
  }
  out << "]";
  return out.str();
}

}  // namespace

void FitConfig::validate() const {
  if (!(log_theta_lower < log_theta_upper)) throw ParameterError("log theta bounds must satisfy lower < upper");
  if (restarts < 1) throw ParameterError("at least one optimizer restart is required");
  if (max_iterations < 1) throw ParameterError("max_iterations must be positive");
  if (!(nugget >= 0.0) || !std::isfinite(nugget)) throw ParameterError("nugget must be non-negative");
  if (nugget_mode == NuggetMode::auto_escalate && !(nugget > 0.0)) {
    throw ParameterError("auto nugget escalation needs a positive starting nugget");
  }
  if (nugget_mode == NuggetMode::auto_escalate && !(max_nugget >= nugget)) {
    throw ParameterError("max_nugget must be at least the starting nugget");
  }
}

KrigingModel KrigingModel::condition(Dataset data, KernelParams params) {
  params.validate();
  if (data.empty()) throw InputError("cannot condition on an empty dataset");
  if (params.dim() != data.dim()) {
    throw InputError("kernel dimension " + std::to_string(params.dim()) + " does not match data dimension " +
                     std::to_string(data.dim()));
  }
  if (params.sigma2_gamma == 0.0 && has_duplicate_rows(data.x())) {
    throw ConditioningError("duplicate training rows require a positive nugget (n = " +
                            std::to_string(data.size()) + ")");
  }
  auto c = detail::condition(data, params);
  if (!c) {
    throw ConditioningError("covariance matrix of " + std::to_string(data.size()) +
                            " points is not positive definite at nugget " + std::to_string(params.sigma2_gamma));
  }
  KrigingModel m;
  m.data_ = std::move(data);
  m.params_ = std::move(params);
  m.chol_ = std::move(c->chol);
  m.alpha_ = m.chol_.transpose().triangularView<Eigen::Upper>().solve(c->whitened_resid);
  m.beta_ = m.chol_.transpose().triangularView<Eigen::Upper>().solve(c->whitened_ones);
  m.whitened_ones_ = std::move(c->whitened_ones);
  m.ones_quad_ = c->ones_quad;
  m.mu_hat_ = c->mu_hat;
  m.log_likelihood_ = c->log_likelihood;
  return m;
}

std::pair<double, double> KrigingModel::predict_point(const Eigen::Ref<const Vector>& query) const {
  const Vector c = kernel_vector(params_, data_.x(), query);
  const double mean = mu_hat_ + c.dot(alpha_);
  const Vector v = chol_.triangularView<Eigen::Lower>().solve(c);
  const double correction = 1.0 - v.dot(whitened_ones_);
  const double variance = params_.sigma2_gamma + params_.sigma2_eps - v.squaredNorm() +
                          correction * correction / ones_quad_;
  return {mean, std::max(variance, 0.0)};
}

Prediction KrigingModel::predict(const Eigen::Ref<const Matrix>& queries) const {
  require_dim(queries, data_.dim(), "query points");
  Prediction out{Vector(queries.rows()), Vector(queries.rows())};
  // Each row is solved on its own; results do not depend on the batch.
  for (Index i = 0; i < queries.rows(); ++i) {
    const auto [mean, variance] = predict_point(queries.row(i).transpose());
    out.mean(i) = mean;
    out.variance(i) = variance;
  }
  return out;
}

KrigingModel fit(const Dataset& data, const FitConfig& config) {
  config.validate();
  if (data.size() < 2) throw InputError("fitting requires at least two points");

  std::vector<Vector> tried;
  const detail::ParamLayout layout{data.dim(), config.isotropic, config.nugget_mode == NuggetMode::optimized};
  auto finish = [&](const Candidate& best, double nugget) {
    return KrigingModel::condition(data, layout.unpack(best.log_params, nugget));
  };

  if (config.nugget_mode == NuggetMode::auto_escalate) {
    for (double nugget = config.nugget; nugget <= config.max_nugget * (1.0 + 1e-9); nugget *= 10.0) {
      if (auto best = multistart(data, config, nugget, tried)) return finish(*best, nugget);
    }
    throw ConditioningError("covariance of " + std::to_string(data.size()) +
                            " points not positive definite up to nugget " + std::to_string(config.max_nugget) +
                            "; start points (theta..., sigma2_eps) tried: " + describe_theta(tried));
  }

  if (config.nugget_mode == NuggetMode::fixed && config.nugget == 0.0 && has_duplicate_rows(data.x())) {
    throw ConditioningError("duplicate training rows require a positive nugget (n = " +
                            std::to_string(data.size()) + ")");
  }
  if (auto best = multistart(data, config, config.nugget, tried)) return finish(*best, config.nugget);
  throw ConditioningError("covariance of " + std::to_string(data.size()) +
                          " points not positive definite; start points (theta..., sigma2_eps) tried: " + describe_theta(tried));
}

double log_marginal_likelihood(const Dataset& data, const KernelParams& p) {
  p.validate();
  if (p.dim() != data.dim()) throw InputError("kernel dimension does not match data dimension");
  const auto c = detail::condition(data, p);
  if (!c) {
    throw ConditioningError("covariance matrix of " + std::to_string(data.size()) +
                            " points is not positive definite");
  }
  return c->log_likelihood;
}

}  // namespace ck
