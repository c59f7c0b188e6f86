#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "clusterkriging/error.hpp"
#include "clusterkriging/metrics.hpp"

using namespace ck;

namespace {

Vector v(std::initializer_list<double> values) {
  Vector out(static_cast<Index>(values.size()));
  std::copy(values.begin(), values.end(), out.data());
  return out;
}

}  // namespace

TEST_CASE("r2 score") {
  const Vector y = v({1, 2, 3});
  CHECK(r2_score(y, y) == 1.0);
  CHECK(r2_score(y, Vector::Constant(3, 2.0)) == 0.0);
  CHECK(r2_score(y, v({1, 2, 4})) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(r2_score(Vector::Constant(4, 1.0), Vector::Zero(4)), MetricError);
  CHECK_THROWS_AS(r2_score(y, Vector::Zero(2)), InputError);
}

TEST_CASE("smse") {
  const Vector y = v({0.5, -1.0, 2.0, 4.0});
  CHECK(smse(y, y) == 0.0);
  CHECK(smse(y, Vector::Constant(4, y.mean())) == 1.0);
  CHECK_THROWS_AS(smse(Vector::Constant(3, 2.0), Vector::Zero(3)), MetricError);

  // Shared standardization: an R2 of 0.784 corresponds to an SMSE of 0.216.
  const Vector truth = v({1.0, 2.0, 3.0, 4.0, 5.0});
  const double sst = (truth.array() - truth.mean()).square().sum();
  Vector pred = truth;
  pred(0) += std::sqrt((1.0 - 0.784) * sst);
  CHECK(r2_score(truth, pred) == doctest::Approx(0.784).epsilon(1e-12));
  CHECK(smse(truth, pred) == doctest::Approx(0.216).epsilon(1e-12));
}

TEST_CASE("smse is the complement of r2") {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 2 + trial % 40;
    Vector y(n), p(n);
    for (Index i = 0; i < n; ++i) {
      y(i) = g(gen);
      p(i) = g(gen);
    }
    CHECK(std::abs(smse(y, p) - (1.0 - r2_score(y, p))) < 1e-10);
  }
}

TEST_CASE("msll") {
  SUBCASE("trivial predictor scores zero") {
    const Vector y = v({0.2, 1.5, -0.3});
    CHECK(msll(y, Vector::Constant(3, 0.4), Vector::Constant(3, 2.0), 0.4, 2.0) == 0.0);
  }
  SUBCASE("perfect mean at the trivial variance is negative") {
    const Vector y = v({0.2, 1.5, -0.3});
    CHECK(msll(y, y, Vector::Constant(3, 1.0), 0.0, 1.0) < 0.0);
  }
  SUBCASE("hand-computed small-variance penalty") {
    const double value = msll(v({0.0}), v({1.0}), v({0.1}), 0.0, 1.0);
    const double expected = 0.5 * std::log(0.2 * std::numbers::pi) + 5.0 - 0.5 * std::log(2.0 * std::numbers::pi);
    CHECK(value == doctest::Approx(expected).epsilon(1e-14));
    CHECK(value == doctest::Approx(3.8488).epsilon(1e-4));
  }
  SUBCASE("monotone in the squared error") {
    double previous = -1e300;
    for (int i = 0; i < 20; ++i) {
      const double value = msll(v({0.0}), v({0.1 * i}), v({0.5}), 0.0, 1.0);
      CHECK(value > previous);
      previous = value;
    }
  }
  SUBCASE("legacy form") {
    const double value = msll(v({0.0}), v({1.0}), v({0.1}), 0.0, 1.0, MsllForm::legacy_printed);
    const double expected = 0.5 * std::log(std::numbers::pi * 0.1 + 1.0 / 0.1) - 0.5 * std::log(std::numbers::pi);
    CHECK(value == doctest::Approx(expected).epsilon(1e-14));
  }
  SUBCASE("non-positive variance is rejected") {
    CHECK_THROWS_AS(msll(v({0.0}), v({0.0}), v({0.0}), 0.0, 1.0), InputError);
    CHECK_THROWS_AS(msll(v({0.0}), v({0.0}), v({1.0}), 0.0, 0.0), InputError);
  }
}

TEST_CASE("metrics are invariant under a shared permutation") {
  const Vector y = v({3.0, -1.0, 0.5, 2.0, 7.0});
  const Vector p = v({2.5, -0.5, 0.0, 2.5, 6.0});
  const Vector s = v({0.3, 0.2, 1.0, 0.5, 2.0});
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(5);
  perm.indices() << 4, 2, 0, 3, 1;
  const Vector yp = perm * y, pp = perm * p, sp = perm * s;
  CHECK(r2_score(yp, pp) == doctest::Approx(r2_score(y, p)).epsilon(1e-14));
  CHECK(smse(yp, pp) == doctest::Approx(smse(y, p)).epsilon(1e-14));
  CHECK(msll(yp, pp, sp, 1.0, 4.0) == doctest::Approx(msll(y, p, s, 1.0, 4.0)).epsilon(1e-14));
}

TEST_CASE("k-fold split") {
  SUBCASE("balanced folds") {
    const auto f = kfold_split(10, 5, 3);
    for (Index k = 0; k < 5; ++k) CHECK(std::count(f.begin(), f.end(), k) == 2);
  }
  SUBCASE("sizes differ by at most one and cover every row once") {
    const auto f = kfold_split(23, 4, 8);
    REQUIRE(f.size() == 23);
    std::vector<long> sizes(4, 0);
    for (Index k : f) {
      REQUIRE(k >= 0);
      REQUIRE(k < 4);
      ++sizes[static_cast<std::size_t>(k)];
    }
    CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);
  }
  SUBCASE("deterministic per seed") {
    CHECK(kfold_split(50, 5, 42) == kfold_split(50, 5, 42));
    CHECK(kfold_split(50, 5, 42) != kfold_split(50, 5, 43));
  }
  SUBCASE("invalid fold counts") {
    CHECK_THROWS_AS(kfold_split(3, 4, 0), ParameterError);
    CHECK_THROWS_AS(kfold_split(10, 1, 0), ParameterError);
  }
}
