#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <mutex>
#include <optional>

#include "clusterkriging/bench.hpp"
#include "clusterkriging/error.hpp"
#include "clusterkriging/random.hpp"
#include "parallel.hpp"

namespace ck {

namespace {

constexpr std::uint64_t kFoldStream = 0xf01d0001;

struct Cell {
  Flavor flavor;
  Index sweep;
  Index fold;
  bool last_in_group;
};

struct Scaling {
  Eigen::RowVectorXd x_mean, x_scale;
  double y_mean = 0.0, y_scale = 1.0;
};

double population_variance(const Vector& v) { return (v.array() - v.mean()).square().mean(); }

Scaling fit_scaling(const Dataset& train, bool enabled) {
  Scaling s;
  const Index d = train.dim();
  s.x_mean = Eigen::RowVectorXd::Zero(d);
  s.x_scale = Eigen::RowVectorXd::Ones(d);
  if (!enabled) return s;
  s.x_mean = train.x().colwise().mean();
  for (Index k = 0; k < d; ++k) {
    const double sd = std::sqrt(population_variance(train.x().col(k)));
    s.x_scale(k) = sd > 0.0 ? sd : 1.0;
  }
  s.y_mean = train.y().mean();
  const double sd = std::sqrt(population_variance(train.y()));
  s.y_scale = sd > 0.0 ? sd : 1.0;
  return s;
}

Matrix scale_x(const Matrix& x, const Scaling& s) {
  return (x.rowwise() - s.x_mean).array().rowwise() / s.x_scale.array();
}

Dataset load_dataset(const DatasetSpec& spec) {
  if (!spec.csv_path.empty()) return load_csv(spec.csv_path, spec.target_column);
  return synth_dataset(spec.function, spec.n, spec.d, spec.seed, spec.pairwise_extension);
}

void require_sweep(const std::vector<Index>& values, const char* what) {
  if (values.empty()) throw ParameterError(std::string(what) + " sweep is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 1) throw ParameterError(std::string(what) + " sweep values must be positive");
    if (i > 0 && values[i] <= values[i - 1]) {
      throw ParameterError(std::string(what) + " sweep values must be strictly ascending");
    }
  }
}

EvalReport evaluate_cell(const ExperimentConfig& config, const Dataset& data, const std::vector<Index>& folds,
                         const Cell& cell) {
  IndexSet train_rows, test_rows;
  for (Index i = 0; i < data.size(); ++i) {
    (folds[static_cast<std::size_t>(i)] == cell.fold ? test_rows : train_rows).push_back(i);
  }
  const Dataset train = data.subset(train_rows);
  const Dataset test = data.subset(test_rows);
  const Scaling s = fit_scaling(train, config.standardize);
  const Dataset scaled(scale_x(train.x(), s), (train.y().array() - s.y_mean) / s.y_scale);

  ClusterKrigingConfig cc;
  cc.flavor = cell.flavor;
  cc.fit = config.fit;
  cc.overlap = config.overlap;
  cc.seed = derive_seed(config.seed, static_cast<std::uint64_t>(cell.fold));
  if (cell.flavor == Flavor::sod) {
    cc.subset_size = cell.sweep;
  } else if (cell.flavor != Flavor::full) {
    cc.clusters = cell.sweep;
  }

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const ClusterKrigingModel model = ck_fit(scaled, cc);
  const auto t1 = clock::now();
  const CombinedPrediction pred = model.predict(scale_x(test.x(), s));
  const auto t2 = clock::now();

  const Vector mean = (pred.mean.array() * s.y_scale + s.y_mean).matrix();
  const double train_mean = train.y().mean();
  const double train_var = population_variance(train.y());
  const double floor = 1e-12 * (train_var > 0.0 ? train_var : 1.0);
  const Vector var = (pred.variance.array() * s.y_scale * s.y_scale).max(floor).matrix();

  EvalReport report;
  report.r2 = r2_score(test.y(), mean);
  report.smse = smse(test.y(), mean);
  report.msll = msll(test.y(), mean, var, train_mean, train_var, config.msll_form);
  report.fit_time_s = std::chrono::duration<double>(t1 - t0).count();
  report.predict_time_s = std::chrono::duration<double>(t2 - t1).count();
  return report;
}

}  // namespace

std::string DatasetSpec::label() const {
  if (csv_path.empty()) return function;
  return std::filesystem::path(csv_path).stem().string();
}

std::vector<Index> ExperimentConfig::sweep_for(Flavor flavor) const {
  if (flavor == Flavor::full) return {1};
  if (flavor == Flavor::sod) return subset_sizes;
  return clusters;
}

void ExperimentConfig::validate() const {
  if (flavors.empty()) throw ParameterError("no flavors selected");
  for (std::size_t i = 0; i < flavors.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (flavors[i] == flavors[j]) throw ParameterError("flavor '" + std::string(to_string(flavors[i])) + "' listed twice");
    }
  }
  const bool any_clustered = std::any_of(flavors.begin(), flavors.end(),
                                         [](Flavor f) { return f != Flavor::sod && f != Flavor::full; });
  const bool any_sod = std::find(flavors.begin(), flavors.end(), Flavor::sod) != flavors.end();
  if (any_clustered) require_sweep(clusters, "cluster count");
  if (any_sod) require_sweep(subset_sizes, "subset size");
  if (folds < 2) throw ParameterError("folds must be at least 2");
  if (workers < 1) throw ParameterError("workers must be at least 1");
  if (!(overlap >= 1.0 && overlap <= 2.0)) throw ParameterError("overlap must lie in [1, 2]");
  fit.validate();
  if (dataset.csv_path.empty()) {
    test_function(dataset.function);
    if (dataset.d < 1) throw ParameterError("synthetic datasets need d >= 1");
    if (dataset.n < 10 * folds) {
      throw ParameterError("n = " + std::to_string(dataset.n) + " is below 10 x folds = " + std::to_string(10 * folds));
    }
  }
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      const std::function<void(const ResultRow&)>& sink) {
  config.validate();
  const Dataset data = load_dataset(config.dataset);
  if (data.size() < 10 * config.folds) {
    throw ParameterError("dataset has " + std::to_string(data.size()) + " rows, below 10 x folds = " +
                         std::to_string(10 * config.folds));
  }
  const std::string label = config.dataset.label();
  const std::vector<Index> folds = kfold_split(data.size(), config.folds, derive_seed(config.seed, kFoldStream));

  std::vector<Cell> cells;
  for (Flavor flavor : config.flavors) {
    for (Index sweep : config.sweep_for(flavor)) {
      for (Index f = 0; f < config.folds; ++f) cells.push_back({flavor, sweep, f, f + 1 == config.folds});
    }
  }

  std::vector<std::optional<ResultRow>> done(cells.size());
  std::vector<ResultRow> emitted;
  std::vector<ResultRow> group;
  std::size_t next = 0;
  std::mutex mutex;
  std::atomic<bool> abort{false};

  auto emit = [&](const ResultRow& row) {
    emitted.push_back(row);
    if (sink) sink(row);
  };

  detail::parallel_for(cells.size(), config.workers, [&](std::size_t i) {
    if (abort) return;
    const Cell& cell = cells[i];
    ResultRow row;
    row.dataset = label;
    row.flavor = std::string(to_string(cell.flavor));
    row.sweep = cell.sweep;
    row.fold = cell.fold;
    try {
      row.report = evaluate_cell(config, data, folds, cell);
    } catch (const std::exception& e) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.report = {nan, nan, nan, nan, nan};
      row.error = e.what();
    }

    std::lock_guard lock(mutex);
    done[i] = std::move(row);
    try {
      while (next < cells.size() && done[next]) {
        emit(*done[next]);
        group.push_back(*done[next]);
        if (cells[next].last_in_group) {
          emit(aggregate_rows(group).front());
          group.clear();
        }
        done[next].reset();
        ++next;
      }
    } catch (...) {
      abort = true;
      throw;
    }
  });
  return emitted;
}

}  // namespace ck
