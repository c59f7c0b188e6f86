#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clusterkriging/cluster_kriging.hpp"
#include "clusterkriging/dataset.hpp"
#include "clusterkriging/metrics.hpp"

namespace ck {

// ------------------------------------------------------------ synthetic data

struct TestFunction {
  std::string_view name;
  double lower;  // sampling box [lower, upper]^d
  double upper;
  bool two_dimensional;  // standard form is defined for d = 2 only
};

/// All supported benchmark functions, in a fixed order.
const std::vector<TestFunction>& test_functions();
/// Throws ParameterError for an unknown name.
const TestFunction& test_function(std::string_view name);

/// f(x) for one point. Two-dimensional functions accept d > 2 only with
/// `pairwise_extension`, which sums the 2-d form over consecutive coordinate
/// pairs (x0,x1), (x1,x2), ...
double evaluate_test_function(std::string_view name, const Eigen::Ref<const Vector>& x,
                              bool pairwise_extension = false);

/// n points drawn uniformly from the function's box, noise-free targets.
Dataset synth_dataset(std::string_view name, Index n, Index d, std::uint64_t seed, bool pairwise_extension = false);

// ----------------------------------------------------------------------- CSV

/// Header row required. X is every non-target column in file order; the
/// target defaults to the last column.
Dataset load_csv(const std::string& path, const std::optional<std::string>& target_column = std::nullopt);

/// Writes columns x0..x{d-1},y with round-trip precision.
void write_csv(const Dataset& data, const std::string& path);

// ---------------------------------------------------------------- experiments

enum class ResultFormat { csv, json };
ResultFormat parse_result_format(std::string_view name);

struct DatasetSpec {
  /// Synthetic function name; ignored when csv_path is set.
  std::string function = "rastrigin";
  Index n = 2000;
  Index d = 5;
  std::uint64_t seed = 0;
  bool pairwise_extension = false;
  std::string csv_path;
  std::optional<std::string> target_column;

  /// Label written to the dataset column of result rows.
  std::string label() const;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  std::vector<Flavor> flavors{Flavor::owck, Flavor::owfck, Flavor::gmmck, Flavor::mtck, Flavor::sod};
  /// Sweep for the cluster flavors (k, or max leaves for mtck).
  std::vector<Index> clusters{2, 4, 8, 16};
  /// Sweep for sod.
  std::vector<Index> subset_sizes{64, 128, 256, 512};
  Index folds = 5;
  FitConfig fit;
  double overlap = 1.1;
  /// z-score features and target on each training fold.
  bool standardize = true;
  MsllForm msll_form = MsllForm::standard;
  int workers = 1;
  std::uint64_t seed = 0;

  void validate() const;
  /// Sweep values used for a flavor (full has the single value 1).
  std::vector<Index> sweep_for(Flavor flavor) const;
};

struct ResultRow {
  std::string dataset;
  std::string flavor;
  Index sweep = 0;
  std::optional<Index> fold;  // nullopt for the mean-over-folds row
  EvalReport report;
  std::string error;  // non-empty for a failed cell

  bool failed() const noexcept { return !error.empty(); }
};

inline constexpr std::string_view kResultsHeader = "dataset,flavor,sweep,fold,r2,smse,msll,fit_time_s,predict_time_s";

/// Fits and scores every (flavor, sweep value, fold) cell. Rows reach `sink`
/// in a fixed order regardless of `workers`: each cell's folds, then their
/// mean row. Failed cells yield rows with NaN metrics and an error message.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      const std::function<void(const ResultRow&)>& sink = {});

/// Mean-over-folds rows for every (dataset, flavor, sweep) group of per-fold rows.
std::vector<ResultRow> aggregate_rows(const std::vector<ResultRow>& rows);

/// One CSV line (no newline) with 6 significant digits per float.
std::string format_csv_row(const ResultRow& row);

/// Incrementally persisted results: CSV rows are appended and flushed; JSON is
/// rewritten as a complete array after every row.
class ResultWriter {
 public:
  ResultWriter(std::string path, ResultFormat format);
  void write(const ResultRow& row);

 private:
  std::string path_;
  ResultFormat format_;
  std::vector<ResultRow> rows_;
};

/// The full text emit_results would write.
std::string format_results(const std::vector<ResultRow>& rows, ResultFormat format);

/// Writes all rows at once. Throws ParameterError for an empty list.
void emit_results(const std::vector<ResultRow>& rows, ResultFormat format, const std::string& path);

/// Reads a results file written by emit_results/ResultWriter (format from content).
std::vector<ResultRow> read_results(const std::string& path);

}  // namespace ck
