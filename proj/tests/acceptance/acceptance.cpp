#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "clusterkriging/bench.hpp"
#include "clusterkriging/cluster_kriging.hpp"
#include "clusterkriging/gp.hpp"
#include "clusterkriging/metrics.hpp"
#include "oracles.hpp"

using namespace ck;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

Outcome oracle_equivalence() {
  std::mt19937_64 gen(101);
  std::uniform_int_distribution<int> size(2, 20), dim(1, 3);
  std::uniform_real_distribution<double> log_theta(std::log(0.2), std::log(5.0)), sigma(0.3, 3.0);
  double worst = 0.0;
  for (int problem = 0; problem < 25; ++problem) {
    const Index n = size(gen), d = dim(gen);
    const Matrix x = oracle::random_matrix(n, d, gen, -1.0, 1.0);
    const Vector y = oracle::random_matrix(n, 1, gen, -2.0, 2.0).col(0);
    Vector theta(d);
    for (Index k = 0; k < d; ++k) theta(k) = std::exp(log_theta(gen));
    const KernelParams p{theta, sigma(gen), problem % 2 == 0 ? 1e-6 : 1e-3};
    const Matrix q = oracle::random_matrix(15, d, gen, -1.2, 1.2);
    const Prediction got = KrigingModel::condition(Dataset(x, y), p).predict(q);
    const oracle::DensePosterior ref = oracle::ordinary_kriging<long double>(x, y, theta, p.sigma2_eps, p.sigma2_gamma, q);
    worst = std::max({worst, (got.mean - ref.mean).cwiseAbs().maxCoeff(),
                      (got.variance - ref.variance.cwiseMax(0.0)).cwiseAbs().maxCoeff()});
  }
  return {worst <= 1e-8, fmt("max |difference| over 25 problems = %.3g (limit 1e-8)", worst)};
}

Outcome exact_interpolation() {
  const Index n = 20;
  Matrix x(n, 1);
  for (Index i = 0; i < n; ++i) x(i, 0) = 10.0 * static_cast<double>(i) / static_cast<double>(n - 1);
  const Vector y = x.col(0).array().sin() + 0.3 * x.col(0).array();
  const KrigingModel model = KrigingModel::condition(Dataset(x, y), KernelParams{Vector::Constant(1, 2.0), 1.0, 0.0});
  const Prediction p = model.predict(x);
  const double mean_err = (p.mean - y).cwiseAbs().maxCoeff();
  const double var = p.variance.maxCoeff();
  return {mean_err < 1e-6 && var < 1e-8, fmt("max |m(x_i) - y_i| = %.3g, max s2(x_i) = %.3g", mean_err, var)};
}

Outcome degenerate_partitions() {
  std::mt19937_64 gen(202);
  const Matrix x = oracle::random_matrix(150, 2, gen, -2.0, 2.0);
  Vector y(150);
  for (Index i = 0; i < 150; ++i) y(i) = std::sin(2.0 * x(i, 0)) * std::cos(x(i, 1)) + 0.2 * x(i, 1);
  const Dataset data(x, y);
  const Matrix q = oracle::random_matrix(100, 2, gen, -2.0, 2.0);

  ClusterKrigingConfig config;
  config.clusters = 1;
  config.seed = 7;
  FitConfig reference = config.fit;
  reference.seed = cluster_seed(config.seed, 0);
  const Prediction full = fit(data, reference).predict(q);

  double worst = 0.0;
  for (Flavor f : {Flavor::owck, Flavor::owfck, Flavor::gmmck, Flavor::mtck}) {
    config.flavor = f;
    const CombinedPrediction p = ck_fit(data, config).predict(q);
    worst = std::max({worst, (p.mean - full.mean).cwiseAbs().maxCoeff(),
                      (p.variance - full.variance).cwiseAbs().maxCoeff()});
  }
  return {worst <= 1e-8, fmt("max |difference| from full kriging over 4 flavors = %.3g", worst)};
}

Outcome optimal_weight_minimality() {
  std::mt19937_64 gen(303);
  std::uniform_int_distribution<int> count(1, 8);
  std::uniform_real_distribution<double> variance(0.01, 10.0);
  long violations = 0;
  double tightest = std::numeric_limits<double>::infinity();
  for (int instance = 0; instance < 1000; ++instance) {
    const Index k = count(gen);
    Vector s2(k);
    for (Index l = 0; l < k; ++l) s2(l) = variance(gen);
    const Vector w = optimal_weights(s2);
    const double best = (w.array().square() * s2.array()).sum();
    Eigen::ArrayXXd v(k, 100000);
    for (Index j = 0; j < v.cols(); ++j) {
      for (Index l = 0; l < k; ++l) v(l, j) = (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
    }
    v = -v.log();
    const Eigen::ArrayXd totals = v.colwise().sum().transpose();
    const Eigen::ArrayXd combined =
        (v.square().colwise() * s2.array()).colwise().sum().transpose() / totals.square();
    violations += (combined * (1.0 + 1e-12) < best).count();
    tightest = std::min(tightest, combined.minCoeff() / best);
  }
  return {violations == 0, fmt("%.0f violations in 1e8 simplex samples; closest ratio sample/optimal = %.9f",
                               static_cast<double>(violations), tightest)};
}

Outcome mixture_variance_identity() {
  std::mt19937_64 gen(404);
  std::uniform_int_distribution<int> count(2, 6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (int instance = 0; instance < 10; ++instance) {
    const Index k = count(gen);
    std::vector<Prediction> preds;
    Matrix w(1, k);
    for (Index l = 0; l < k; ++l) {
      preds.push_back({Vector::Constant(1, 6.0 * u(gen) - 3.0), Vector::Constant(1, 0.05 + 2.0 * u(gen))});
      w(0, l) = 0.05 + u(gen);
    }
    w /= w.sum();
    const double analytic = combine_membership(preds, MembershipMatrix{w}).variance(0);

    std::discrete_distribution<Index> pick(w.data(), w.data() + k);
    double sum = 0.0, sum_sq = 0.0;
    const int samples = 1000000;
    for (int s = 0; s < samples; ++s) {
      const Prediction& c = preds[static_cast<std::size_t>(pick(gen))];
      const double z = c.mean(0) + std::sqrt(c.variance(0)) * normal(gen);
      sum += z;
      sum_sq += z * z;
    }
    const double mean = sum / samples;
    const double mc = sum_sq / samples - mean * mean;
    worst = std::max(worst, std::abs(mc - analytic) / analytic);
  }
  return {worst < 0.01, fmt("max relative error vs 1e6-sample Monte Carlo = %.4f (limit 0.01)", worst)};
}

Outcome table_ordering() {
  int ordered = 0;
  std::string detail;
  for (const char* function : {"rastrigin", "schwefel", "rosenbrock"}) {
    ExperimentConfig config;
    config.dataset.function = function;
    config.dataset.n = 2000;
    config.dataset.d = 5;
    config.dataset.seed = 2016;
    config.seed = 2016;
    config.folds = 5;
    config.flavors = {Flavor::mtck, Flavor::sod};
    config.clusters = {8};
    config.subset_sizes = {512};
    double mtck = NAN, sod = NAN;
    for (const ResultRow& row : run_experiment(config)) {
      if (row.fold) continue;
      (row.flavor == "mtck" ? mtck : sod) = row.report.r2;
    }
    const bool ok = mtck >= 0.95 && mtck > sod;
    ordered += ok ? 1 : 0;
    detail += std::string(detail.empty() ? "" : "; ") + function + fmt(" mtck R2 %.4f vs sod R2 %.4f", mtck, sod) +
              (ok ? " ok" : " short");
  }
  return {ordered >= 2, std::to_string(ordered) + "/3 functions meet R2 >= 0.95 and beat SoD (" + detail + ")"};
}

Outcome complexity_scaling() {
  ExperimentConfig config;
  config.dataset.function = "rastrigin";
  config.dataset.n = 2000;
  config.dataset.d = 5;
  config.dataset.seed = 2016;
  config.seed = 2016;
  config.flavors = {Flavor::owck};
  config.clusters = {2, 8};
  double t2 = NAN, t8 = NAN;
  for (const ResultRow& row : run_experiment(config)) {
    if (row.fold) continue;
    (row.sweep == 2 ? t2 : t8) = row.report.fit_time_s;
  }
  const double ratio = t2 / t8;
  return {ratio >= 4.0, fmt("mean fit time k=2 %.2f s, k=8 %.2f s, ratio %.2f (need >= 4)", t2, t8, ratio)};
}

Outcome metric_sanity() {
  std::mt19937_64 gen(505);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  bool trivial_ok = true, perfect_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = 2 + trial % 100;
    Vector y(n), p(n);
    for (Index i = 0; i < n; ++i) {
      y(i) = 3.0 * g(gen) + 1.0;
      p(i) = g(gen);
    }
    worst = std::max(worst, std::abs(smse(y, p) - (1.0 - r2_score(y, p))));
    const double mean = y.mean();
    const double var = (y.array() - mean).square().mean();
    const Vector trivial = Vector::Constant(n, mean);
    trivial_ok = trivial_ok && msll(y, trivial, Vector::Constant(n, var), mean, var) == 0.0;
    trivial_ok = trivial_ok && smse(y, trivial) == 1.0;
    perfect_ok = perfect_ok && r2_score(y, y) == 1.0;
  }
  return {worst <= 1e-10 && trivial_ok && perfect_ok,
          fmt("max |smse - (1 - r2)| = %.3g", worst) + "; trivial MSLL = 0 and SMSE = 1 " +
              (trivial_ok ? "exactly" : "violated") + "; perfect R2 = 1 " + (perfect_ok ? "exactly" : "violated")};
}

std::vector<std::string> metric_columns(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    std::stringstream cells(line);
    std::string cell, kept;
    for (int c = 0; c < 7 && std::getline(cells, cell, ','); ++c) kept += cell + ",";
    out.push_back(kept);
  }
  return out;
}

Outcome determinism(const std::string& bench) {
  if (bench.empty()) return {false, "no ck-bench path given (--bench)"};
  const auto dir = std::filesystem::temp_directory_path() / "ck_acceptance_determinism";
  std::filesystem::create_directories(dir);
  std::vector<std::vector<std::string>> runs;
  for (int r = 0; r < 2; ++r) {
    const std::string out = (dir / ("run" + std::to_string(r) + ".csv")).string();
    const std::string cmd = "\"" + bench +
                            "\" run --function ackley --n 300 --d 3 --flavor owck --flavor owfck --flavor gmmck"
                            " --flavor mtck --flavor sod --clusters 2 --clusters 4 --subset-size 64 --folds 5"
                            " --seed 99 --out \"" + out + "\" 2> /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "ck-bench run exited with an error"};
    runs.push_back(metric_columns(out));
  }
  std::filesystem::remove_all(dir);
  const bool same = runs[0] == runs[1] && runs[0].size() == 55;
  return {same, std::to_string(runs[0].size()) + " and " + std::to_string(runs[1].size()) +
                    " lines; metric columns " + (runs[0] == runs[1] ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  std::string bench;
  app.add_option("--criterion", only, "Run a single criterion (1-9)")->check(CLI::Range(1, 9));
  app.add_option("--bench", bench, "Path to the ck-bench executable (criterion 9)");
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"oracle equivalence", 5.0, oracle_equivalence},
      {"exact interpolation", 1.0, exact_interpolation},
      {"degenerate-partition equivalence", 30.0, degenerate_partitions},
      {"optimal-weight minimality", 10.0, optimal_weight_minimality},
      {"mixture-variance identity", 30.0, mixture_variance_identity},
      {"desk-scale ordering", 600.0, table_ordering},
      {"complexity scaling", 300.0, complexity_scaling},
      {"metric sanity", 0.0, metric_sanity},
      {"determinism", 0.0, [&] { return determinism(bench); }},
  };

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    const Criterion& c = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = outcome.pass;
    std::string timing = fmt("%.2f s", seconds);
    if (c.limit_s > 0.0) {
      timing += fmt(" of %.0f s", c.limit_s);
      pass = pass && seconds < c.limit_s;
    }
    all = all && pass;
    std::cout << "criterion " << i + 1 << " (" << c.name << "): " << (pass ? "PASS" : "FAIL") << " [" << timing
              << "] " << outcome.detail << std::endl;
  }
  return all ? 0 : 1;
}
