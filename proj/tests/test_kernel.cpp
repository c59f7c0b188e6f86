#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Cholesky>

#include "clusterkriging/error.hpp"
#include "clusterkriging/kernel.hpp"
#include "oracles.hpp"

using namespace ck;

TEST_CASE("kernel_eval at zero distance is the process variance") {
  const KernelParams p{Vector::Constant(3, 0.7), 2.5, 0.0};
  const Vector x = Vector::LinSpaced(3, -1.0, 2.0);
  CHECK(kernel_eval(p, x, x) == 2.5);
}

TEST_CASE("kernel_eval hand-computed values") {
  const KernelParams one{Vector::Constant(1, 1.0), 1.0, 0.0};
  CHECK(kernel_eval(one, Vector::Zero(1), Vector::Ones(1)) == doctest::Approx(0.367879441171).epsilon(1e-12));

  const KernelParams two{Vector::Constant(2, 0.5), 2.0, 0.0};
  CHECK(kernel_eval(two, Vector::Zero(2), Vector::Ones(2)) == doctest::Approx(0.735758882343).epsilon(1e-12));
}

TEST_CASE("kernel_eval rejects mismatched dimensions") {
  const KernelParams p{Vector::Ones(2), 1.0, 0.0};
  CHECK_THROWS_AS(kernel_eval(p, Vector::Zero(3), Vector::Zero(2)), InputError);
  CHECK_THROWS_AS(kernel_matrix(p, Matrix::Zero(4, 3), Matrix::Zero(4, 2)), InputError);
}

TEST_CASE("KernelParams validation") {
  CHECK_THROWS_AS((KernelParams{Vector::Constant(2, -1.0), 1.0, 0.0}.validate()), ParameterError);
  CHECK_THROWS_AS((KernelParams{Vector::Ones(2), 0.0, 0.0}.validate()), ParameterError);
  CHECK_THROWS_AS((KernelParams{Vector::Ones(2), 1.0, -1e-3}.validate()), ParameterError);
  CHECK_THROWS_AS((KernelParams{Vector(), 1.0, 0.0}.validate()), ParameterError);
  CHECK_NOTHROW(KernelParams::isotropic(3, 0.2, 1.0, 1e-6));
}

TEST_CASE("kernel_matrix matches element-wise evaluation") {
  std::mt19937_64 gen(11);
  const Matrix a = oracle::random_matrix(7, 3, gen);
  const Matrix b = oracle::random_matrix(5, 3, gen);
  const KernelParams p{(Vector(3) << 0.3, 2.0, 5.0).finished(), 1.7, 0.0};
  const Matrix k = kernel_matrix(p, a, b);
  const Matrix ref = oracle::covariance(p.theta, p.sigma2_eps, a, b);
  REQUIRE(k.rows() == 7);
  REQUIRE(k.cols() == 5);
  CHECK((k - ref).cwiseAbs().maxCoeff() < 1e-14);
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.rows(); ++j) CHECK(k(i, j) == doctest::Approx(kernel_eval(p, a.row(i).transpose(), b.row(j).transpose())).epsilon(1e-15));
  }
}

TEST_CASE("kernel_matrix of a set with itself") {
  std::mt19937_64 gen(3);
  const KernelParams p{Vector::Constant(2, 1.3), 0.8, 0.0};

  SUBCASE("single point") {
    const Matrix a = oracle::random_matrix(1, 2, gen);
    const Matrix k = kernel_matrix(p, a, a);
    REQUIRE(k.size() == 1);
    CHECK(k(0, 0) == 0.8);
  }
  SUBCASE("exactly symmetric with the process variance on the diagonal") {
    const Matrix a = oracle::random_matrix(12, 2, gen);
    const Matrix k = kernel_matrix(p, a, a);
    CHECK(k == k.transpose());
    CHECK((k.diagonal().array() == 0.8).all());
  }
  SUBCASE("large theta drives off-diagonals to zero") {
    const Matrix a = oracle::random_matrix(6, 2, gen);
    const Matrix k = kernel_matrix(KernelParams{Vector::Constant(2, 1e6), 0.8, 0.0}, a, a);
    Matrix off = k;
    off.diagonal().setZero();
    CHECK(off.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("kernel properties on random inputs") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.05, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Index d = 1 + trial % 4;
    KernelParams p{Vector(d), u(gen), 0.0};
    for (Index i = 0; i < d; ++i) p.theta(i) = u(gen);
    const Vector x = oracle::random_matrix(d, 1, gen, -3, 3).col(0);
    const Vector y = oracle::random_matrix(d, 1, gen, -3, 3).col(0);
    const Vector t = oracle::random_matrix(d, 1, gen, -10, 10).col(0);

    const double k = kernel_eval(p, x, y);
    CHECK(k == kernel_eval(p, y, x));
    CHECK(k > 0.0);
    CHECK(k <= p.sigma2_eps);
    CHECK(kernel_eval(p, x + t, y + t) == doctest::Approx(k).epsilon(1e-9));

    const Matrix pts = oracle::random_matrix(1 + trial % 20, d, gen);
    Matrix cov = kernel_matrix(p, pts, pts);
    cov.diagonal().array() += 1e-10;
    CHECK(Eigen::LLT<Matrix>(cov).info() == Eigen::Success);
  }
}

TEST_CASE("kernel_vector agrees with kernel_matrix") {
  std::mt19937_64 gen(5);
  const Matrix pts = oracle::random_matrix(9, 2, gen);
  const Vector q = oracle::random_matrix(2, 1, gen).col(0);
  const KernelParams p{(Vector(2) << 0.5, 3.0).finished(), 1.2, 0.0};
  const Vector v = kernel_vector(p, pts, q);
  const Matrix k = kernel_matrix(p, pts, q.transpose());
  CHECK(v == k.col(0));
}
