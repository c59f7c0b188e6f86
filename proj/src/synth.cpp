#include <cmath>
#include <numbers>
#include <string>

#include "clusterkriging/bench.hpp"
#include "clusterkriging/error.hpp"
#include "clusterkriging/random.hpp"

namespace ck {

namespace {

constexpr double kPi = std::numbers::pi;

double ackley(const Eigen::Ref<const Vector>& x) {
  const double n = static_cast<double>(x.size());
  const double sq = x.squaredNorm() / n;
  const double cs = (2.0 * kPi * x.array()).cos().sum() / n;
  return 20.0 - 20.0 * std::exp(-0.2 * std::sqrt(sq)) + std::numbers::e - std::exp(cs);
}

double schwefel(const Eigen::Ref<const Vector>& x) {
  double s = 0.0;
  for (Index i = 0; i < x.size(); ++i) s += x(i) * std::sin(std::sqrt(std::abs(x(i))));
  return 418.9828872724339 * static_cast<double>(x.size()) - s;
}

double rastrigin(const Eigen::Ref<const Vector>& x) {
  return 10.0 * static_cast<double>(x.size()) + (x.array().square() - 10.0 * (2.0 * kPi * x.array()).cos()).sum();
}

double rosenbrock(const Eigen::Ref<const Vector>& x) {
  if (x.size() == 1) return (1.0 - x(0)) * (1.0 - x(0));
  double s = 0.0;
  for (Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x(i + 1) - x(i) * x(i);
    s += (1.0 - x(i)) * (1.0 - x(i)) + 100.0 * a * a;
  }
  return s;
}

// Sum of different powers, exponents spread from 2 to 12.
double diffpow(const Eigen::Ref<const Vector>& x) {
  const Index n = x.size();
  double s = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double p = n > 1 ? 2.0 + 10.0 * static_cast<double>(i) / static_cast<double>(n - 1) : 2.0;
    s += std::pow(std::abs(x(i)), p);
  }
  return s;
}

double schaffer2(double a, double b) {
  const double r = a * a + b * b;
  const double s = std::sin(50.0 * std::pow(r, 0.1));
  return std::pow(r, 0.25) * (s * s + 1.0);
}

double h1_2(double a, double b) {
  const double num = std::pow(std::sin(a - b / 8.0), 2) + std::pow(std::sin(b + a / 8.0), 2);
  const double den = std::sqrt((a - 8.6998) * (a - 8.6998) + (b - 6.7665) * (b - 6.7665)) + 1.0;
  return num / den;
}

double himmelblau2(double a, double b) {
  const double p = a * a + b - 11.0;
  const double q = a + b * b - 7.0;
  return p * p + q * q;
}

}  // namespace

const std::vector<TestFunction>& test_functions() {
  static const std::vector<TestFunction> table{
      {"ackley", -15.0, 30.0, false},       {"schaffer", -100.0, 100.0, true},
      {"schwefel", -500.0, 500.0, false},   {"rastrigin", -5.12, 5.12, false},
      {"h1", -100.0, 100.0, true},          {"rosenbrock", -2.048, 2.048, false},
      {"himmelblau", -6.0, 6.0, true},      {"diffpow", -1.0, 1.0, false},
  };
  return table;
}

const TestFunction& test_function(std::string_view name) {
  for (const auto& f : test_functions()) {
    if (f.name == name) return f;
  }
  throw ParameterError("unknown test function '" + std::string(name) + "'");
}

double evaluate_test_function(std::string_view name, const Eigen::Ref<const Vector>& x, bool pairwise_extension) {
  const TestFunction& f = test_function(name);
  if (x.size() < 1) throw ParameterError("test functions need d >= 1");
  if (f.two_dimensional) {
    if (x.size() != 2 && !(pairwise_extension && x.size() > 2)) {
      throw ParameterError(std::string(name) + " is defined for d = 2 (got d = " + std::to_string(x.size()) +
                           "; enable the pairwise extension for d > 2)");
    }
    double (*pair)(double, double) = name == "schaffer" ? schaffer2 : name == "h1" ? h1_2 : himmelblau2;
    double s = 0.0;
    for (Index i = 0; i + 1 < x.size(); ++i) s += pair(x(i), x(i + 1));
    return s;
  }
  if (name == "ackley") return ackley(x);
  if (name == "schwefel") return schwefel(x);
  if (name == "rastrigin") return rastrigin(x);
  if (name == "rosenbrock") return rosenbrock(x);
  return diffpow(x);
}

Dataset synth_dataset(std::string_view name, Index n, Index d, std::uint64_t seed, bool pairwise_extension) {
  const TestFunction& f = test_function(name);
  if (n < 1) throw ParameterError("synthetic dataset needs n >= 1");
  if (d < 1) throw ParameterError("synthetic dataset needs d >= 1");
  // validates d for two-dimensional functions before drawing anything
  evaluate_test_function(name, Vector::Zero(d), pairwise_extension);

  Rng rng(seed);
  Matrix x(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) x(i, k) = rng.uniform(f.lower, f.upper);
  }
  Vector y(n);
  for (Index i = 0; i < n; ++i) y(i) = evaluate_test_function(name, x.row(i).transpose(), pairwise_extension);
  return Dataset(std::move(x), std::move(y));
}

}  // namespace ck
