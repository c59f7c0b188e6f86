#include <doctest.h>

#include <cmath>
#include <random>

#include "clusterkriging/cluster_kriging.hpp"
#include "clusterkriging/error.hpp"
#include "oracles.hpp"

using namespace ck;

namespace {

Dataset smooth_data(Index n, Index d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const Matrix x = oracle::random_matrix(n, d, gen, -2.0, 2.0);
  Vector y(n);
  for (Index i = 0; i < n; ++i) y(i) = std::sin(x(i, 0)) + 0.5 * x.row(i).squaredNorm();
  return Dataset(x, y);
}

FitConfig quick_fit() {
  FitConfig f;
  f.restarts = 2;
  f.max_iterations = 30;
  return f;
}

}  // namespace

TEST_CASE("flavor names round-trip") {
  for (Flavor f : {Flavor::owck, Flavor::owfck, Flavor::gmmck, Flavor::mtck, Flavor::sod, Flavor::full}) {
    CHECK(parse_flavor(to_string(f)) == f);
  }
  CHECK_THROWS_AS(parse_flavor("bcm"), ParameterError);
  CHECK(combiner_for(Flavor::owfck) == Combiner::optimal);
  CHECK(combiner_for(Flavor::gmmck) == Combiner::membership);
  CHECK(combiner_for(Flavor::mtck) == Combiner::single_model);
}

TEST_CASE("optimal weights") {
  SUBCASE("equal variances are uniform") {
    const Vector w = optimal_weights(Vector::Constant(4, 2.0));
    CHECK((w.array() - 0.25).abs().maxCoeff() < 1e-15);
  }
  SUBCASE("hand-computed pair") {
    const Vector w = optimal_weights((Vector(2) << 1.0, 3.0).finished());
    CHECK(w(0) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(w(1) == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("zero variances take all the mass") {
    Vector w = optimal_weights((Vector(2) << 0.0, 5.0).finished());
    CHECK(w(0) == 1.0);
    CHECK(w(1) == 0.0);
    w = optimal_weights((Vector(3) << 1e-13, 5.0, 0.0).finished());
    CHECK(w(0) == 0.5);
    CHECK(w(1) == 0.0);
    CHECK(w(2) == 0.5);
  }
  SUBCASE("combined variance is no larger than a weight grid") {
    const Vector s2 = (Vector(3) << 0.4, 1.5, 0.9).finished();
    const Vector w = optimal_weights(s2);
    const double best = (w.array().square() * s2.array()).sum();
    CHECK(best <= s2.minCoeff());
    for (int a = 0; a <= 50; ++a) {
      for (int b = 0; a + b <= 50; ++b) {
        const Vector v = (Vector(3) << a / 50.0, b / 50.0, (50 - a - b) / 50.0).finished();
        CHECK(best <= (v.array().square() * s2.array()).sum() + 1e-15);
      }
    }
  }
}

TEST_CASE("combine_optimal") {
  const std::vector<Prediction> preds{{Vector::Constant(1, 2.0), Vector::Constant(1, 1.0)},
                                      {Vector::Constant(1, 4.0), Vector::Constant(1, 1.0)}};
  const CombinedPrediction c = combine_optimal(preds, Matrix::Constant(1, 2, 0.5));
  CHECK(c.mean(0) == 3.0);
  CHECK(c.variance(0) == 0.5);

  const std::vector<Prediction> single{{Vector::Constant(1, 1.5), Vector::Constant(1, 0.3)}};
  const CombinedPrediction s = combine_optimal(single, Matrix::Ones(1, 1));
  CHECK(s.mean(0) == 1.5);
  CHECK(s.variance(0) == 0.3);
}

TEST_CASE("combine_membership") {
  SUBCASE("hand-computed mixture") {
    const std::vector<Prediction> preds{{Vector::Constant(1, 0.0), Vector::Constant(1, 1.0)},
                                        {Vector::Constant(1, 2.0), Vector::Constant(1, 1.0)}};
    const CombinedPrediction c = combine_membership(preds, MembershipMatrix{Matrix::Constant(1, 2, 0.5)});
    CHECK(c.mean(0) == doctest::Approx(1.0));
    CHECK(c.variance(0) == doctest::Approx(2.0));
  }
  SUBCASE("one-hot selects a model exactly") {
    const std::vector<Prediction> preds{{Vector::Constant(1, 0.7), Vector::Constant(1, 0.2)},
                                        {Vector::Constant(1, -3.0), Vector::Constant(1, 9.0)}};
    const CombinedPrediction c = combine_membership(preds, MembershipMatrix{(Matrix(1, 2) << 1.0, 0.0).finished()});
    CHECK(c.mean(0) == 0.7);
    CHECK(c.variance(0) == 0.2);
  }
  SUBCASE("mixture variance dominates the averaged variance") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      const Index k = 2 + trial % 5;
      std::vector<Prediction> preds;
      Matrix w(1, k);
      for (Index l = 0; l < k; ++l) {
        preds.push_back({Vector::Constant(1, 4.0 * u(gen) - 2.0), Vector::Constant(1, u(gen))});
        w(0, l) = u(gen);
      }
      w /= w.sum();
      const CombinedPrediction c = combine_membership(preds, MembershipMatrix{w});
      double averaged = 0.0;
      for (Index l = 0; l < k; ++l) averaged += w(0, l) * preds[static_cast<std::size_t>(l)].variance(0);
      CHECK(c.variance(0) >= averaged - 1e-12);
    }
  }
}

TEST_CASE("OWCK structure") {
  const Dataset data = smooth_data(400, 2, 1);
  ClusterKrigingConfig config;
  config.flavor = Flavor::owck;
  config.clusters = 4;
  config.fit = quick_fit();
  const ClusterKrigingModel m = ck_fit(data, config);
  CHECK(m.k() == 4);
  Index total = 0;
  for (Index l = 0; l < 4; ++l) {
    const IndexSet& rows = m.partitioning().clusters[static_cast<std::size_t>(l)];
    total += static_cast<Index>(rows.size());
    CHECK(m.models()[static_cast<std::size_t>(l)].data().x() == data.subset(rows).x());
  }
  CHECK(total == 400);

  std::mt19937_64 gen(2);
  const CombinedPrediction p = m.predict(oracle::random_matrix(50, 2, gen, -2.0, 2.0));
  CHECK((p.weights.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-8);
  CHECK(p.weights.minCoeff() >= 0.0);
  CHECK(p.variance.minCoeff() >= 0.0);
}

TEST_CASE("a single cluster reproduces plain kriging") {
  const Dataset data = smooth_data(80, 2, 5);
  std::mt19937_64 gen(6);
  const Matrix q = oracle::random_matrix(40, 2, gen, -2.0, 2.0);
  ClusterKrigingConfig config;
  config.clusters = 1;
  config.fit = quick_fit();
  config.seed = 123;
  FitConfig single = config.fit;
  single.seed = cluster_seed(config.seed, 0);
  const Prediction ref = fit(data, single).predict(q);

  for (Flavor f : {Flavor::owck, Flavor::owfck, Flavor::gmmck, Flavor::mtck, Flavor::full}) {
    CAPTURE(to_string(f));
    config.flavor = f;
    const CombinedPrediction p = ck_fit(data, config).predict(q);
    CHECK((p.mean - ref.mean).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((p.variance - ref.variance).cwiseAbs().maxCoeff() < 1e-8);
  }
  config.flavor = Flavor::sod;
  config.subset_size = 1000;
  const CombinedPrediction sod = ck_fit(data, config).predict(q);
  CHECK((sod.mean - ref.mean).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("MTCK evaluates exactly one model per query") {
  const Dataset data = smooth_data(300, 2, 7);
  ClusterKrigingConfig config;
  config.flavor = Flavor::mtck;
  config.clusters = 5;
  config.fit = quick_fit();
  const ClusterKrigingModel m = ck_fit(data, config);
  REQUIRE(m.k() > 1);
  std::mt19937_64 gen(8);
  const Matrix q = oracle::random_matrix(60, 2, gen, -2.0, 2.0);
  const CombinedPrediction p = m.predict(q);
  CHECK(p.posterior_evaluations == 60);

  const RegressionTree& tree = std::get<RegressionTree>(m.partitioning().assigner);
  const std::vector<Index> leaves = tree_route(tree, q);
  for (Index i = 0; i < q.rows(); ++i) {
    const Index leaf = leaves[static_cast<std::size_t>(i)];
    const auto [mean, var] = m.models()[static_cast<std::size_t>(leaf)].predict_point(q.row(i).transpose());
    CHECK(p.mean(i) == mean);
    CHECK(p.variance(i) == var);
    CHECK(p.weights(i, leaf) == 1.0);
    CHECK(p.weights.row(i).sum() == 1.0);
  }

  config.flavor = Flavor::owck;
  const CombinedPrediction all = ck_fit(data, config).predict(q);
  CHECK(all.posterior_evaluations == 60 * 5);
}

TEST_CASE("GMMCK deep inside a component follows its local model") {
  std::mt19937_64 gen(9);
  const Dataset data = oracle::two_blobs(80, gen, 0.7);
  ClusterKrigingConfig config;
  config.flavor = Flavor::gmmck;
  config.clusters = 2;
  config.fit = quick_fit();
  const ClusterKrigingModel m = ck_fit(data, config);
  const auto& g = std::get<GaussianMixture>(m.partitioning().assigner);
  for (Index l = 0; l < 2; ++l) {
    const Matrix q = g.means().row(l);
    const CombinedPrediction p = m.predict(q);
    const Index top = p.weights(0, 0) > p.weights(0, 1) ? 0 : 1;
    CHECK(p.weights(0, top) > 0.999);
    const double local = m.models()[static_cast<std::size_t>(top)].predict(q).mean(0);
    CHECK(std::abs(p.mean(0) - local) < 1e-3);
  }
}

TEST_CASE("thread count does not change the model") {
  const Dataset data = smooth_data(240, 2, 10);
  std::mt19937_64 gen(11);
  const Matrix q = oracle::random_matrix(30, 2, gen);
  for (Flavor f : {Flavor::owck, Flavor::owfck, Flavor::gmmck, Flavor::mtck}) {
    ClusterKrigingConfig config;
    config.flavor = f;
    config.clusters = 3;
    config.fit = quick_fit();
    config.threads = 1;
    const ClusterKrigingModel a = ck_fit(data, config);
    config.threads = 3;
    const ClusterKrigingModel b = ck_fit(data, config);
    REQUIRE(a.k() == b.k());
    for (Index l = 0; l < a.k(); ++l) {
      CHECK(a.models()[static_cast<std::size_t>(l)].params().theta == b.models()[static_cast<std::size_t>(l)].params().theta);
    }
    const CombinedPrediction pa = a.predict(q, 1);
    const CombinedPrediction pb = b.predict(q, 4);
    CHECK(pa.mean == pb.mean);
    CHECK(pa.variance == pb.variance);
  }
}

TEST_CASE("undersized clusters are rejected") {
  Matrix x(6, 1);
  x << 0.0, 0.1, 0.2, 10.0, 10.1, 50.0;
  const Dataset data(x, x.col(0));
  ClusterKrigingConfig config;
  config.flavor = Flavor::owck;
  config.clusters = 3;
  config.fit = quick_fit();
  CHECK_THROWS_AS(ck_fit(data, config), ParameterError);
  try {
    ck_fit(data, config);
  } catch (const ParameterError& e) {
    CHECK(std::string(e.what()).find("cluster") != std::string::npos);
  }
}

TEST_CASE("recommended cluster count") {
  CHECK(recommended_cluster_count(500) == 1);
  CHECK(recommended_cluster_count(1000) == 1);
  CHECK(recommended_cluster_count(1001) == 2);
  CHECK(recommended_cluster_count(10000) == 10);
}
