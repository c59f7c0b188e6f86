#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "clusterkriging/bench.hpp"
#include "clusterkriging/cluster_kriging.hpp"
#include "clusterkriging/error.hpp"
#include "clusterkriging/gp.hpp"
#include "clusterkriging/metrics.hpp"
#include "clusterkriging/serialize.hpp"

namespace py = pybind11;

namespace {

ck::Dataset make_dataset(const ck::Matrix& x, const ck::Vector& y) { return ck::Dataset(x, y); }

py::tuple as_tuple(const ck::Prediction& p) { return py::make_tuple(p.mean, p.variance); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Ordinary Kriging and Cluster Kriging";

  py::register_exception<ck::InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<ck::ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<ck::MetricError>(m, "MetricError", PyExc_ValueError);
  py::register_exception<ck::ConditioningError>(m, "ConditioningError", PyExc_RuntimeError);
  py::register_exception<ck::IoError>(m, "IoError", PyExc_OSError);

  py::class_<ck::KernelParams>(m, "KernelParams")
      .def(py::init([](ck::Vector theta, double sigma2_eps, double sigma2_gamma) {
             return ck::KernelParams{std::move(theta), sigma2_eps, sigma2_gamma};
           }),
           py::arg("theta"), py::arg("sigma2_eps") = 1.0, py::arg("sigma2_gamma") = 0.0)
      .def_readwrite("theta", &ck::KernelParams::theta)
      .def_readwrite("sigma2_eps", &ck::KernelParams::sigma2_eps)
      .def_readwrite("sigma2_gamma", &ck::KernelParams::sigma2_gamma);

  py::enum_<ck::NuggetMode>(m, "NuggetMode")
      .value("fixed", ck::NuggetMode::fixed)
      .value("optimized", ck::NuggetMode::optimized)
      .value("auto_escalate", ck::NuggetMode::auto_escalate);

  py::class_<ck::FitConfig>(m, "FitConfig")
      .def(py::init<>())
      .def_readwrite("log_theta_lower", &ck::FitConfig::log_theta_lower)
      .def_readwrite("log_theta_upper", &ck::FitConfig::log_theta_upper)
      .def_readwrite("restarts", &ck::FitConfig::restarts)
      .def_readwrite("max_iterations", &ck::FitConfig::max_iterations)
      .def_readwrite("nugget_mode", &ck::FitConfig::nugget_mode)
      .def_readwrite("nugget", &ck::FitConfig::nugget)
      .def_readwrite("max_nugget", &ck::FitConfig::max_nugget)
      .def_readwrite("isotropic", &ck::FitConfig::isotropic)
      .def_readwrite("seed", &ck::FitConfig::seed);

  py::class_<ck::KrigingModel>(m, "KrigingModel")
      .def_static(
          "condition",
          [](const ck::Matrix& x, const ck::Vector& y, const ck::KernelParams& p) {
            return ck::KrigingModel::condition(make_dataset(x, y), p);
          },
          py::arg("x"), py::arg("y"), py::arg("params"))
      .def_property_readonly("params", &ck::KrigingModel::params)
      .def_property_readonly("mu_hat", &ck::KrigingModel::mu_hat)
      .def_property_readonly("log_likelihood", &ck::KrigingModel::log_likelihood)
      .def("predict", [](const ck::KrigingModel& model, const ck::Matrix& q) { return as_tuple(model.predict(q)); },
           py::arg("queries"), "Posterior (mean, variance) at each query row.");

  m.def(
      "fit", [](const ck::Matrix& x, const ck::Vector& y, const ck::FitConfig& c) { return ck::fit(make_dataset(x, y), c); },
      py::arg("x"), py::arg("y"), py::arg("config") = ck::FitConfig{}, py::call_guard<py::gil_scoped_release>());
  m.def("log_marginal_likelihood",
        [](const ck::Matrix& x, const ck::Vector& y, const ck::KernelParams& p) {
          return ck::log_marginal_likelihood(make_dataset(x, y), p);
        },
        py::arg("x"), py::arg("y"), py::arg("params"));

  py::enum_<ck::Flavor>(m, "Flavor")
      .value("owck", ck::Flavor::owck)
      .value("owfck", ck::Flavor::owfck)
      .value("gmmck", ck::Flavor::gmmck)
      .value("mtck", ck::Flavor::mtck)
      .value("sod", ck::Flavor::sod)
      .value("full", ck::Flavor::full);

  py::class_<ck::ClusterKrigingConfig>(m, "ClusterKrigingConfig")
      .def(py::init<>())
      .def_readwrite("flavor", &ck::ClusterKrigingConfig::flavor)
      .def_readwrite("clusters", &ck::ClusterKrigingConfig::clusters)
      .def_readwrite("fit", &ck::ClusterKrigingConfig::fit)
      .def_readwrite("overlap", &ck::ClusterKrigingConfig::overlap)
      .def_readwrite("fuzzifier", &ck::ClusterKrigingConfig::fuzzifier)
      .def_readwrite("min_leaf_size", &ck::ClusterKrigingConfig::min_leaf_size)
      .def_readwrite("subset_size", &ck::ClusterKrigingConfig::subset_size)
      .def_readwrite("threads", &ck::ClusterKrigingConfig::threads)
      .def_readwrite("seed", &ck::ClusterKrigingConfig::seed);

  py::class_<ck::ClusterKrigingModel>(m, "ClusterKrigingModel")
      .def_property_readonly("flavor", &ck::ClusterKrigingModel::flavor)
      .def_property_readonly("k", &ck::ClusterKrigingModel::k)
      .def_property_readonly("clusters",
                             [](const ck::ClusterKrigingModel& model) { return model.partitioning().clusters; })
      .def_property_readonly("models", &ck::ClusterKrigingModel::models)
      .def(
          "predict",
          [](const ck::ClusterKrigingModel& model, const ck::Matrix& q, int threads) {
            const ck::CombinedPrediction p = model.predict(q, threads);
            return py::make_tuple(p.mean, p.variance);
          },
          py::arg("queries"), py::arg("threads") = 1)
      .def("save", [](const ck::ClusterKrigingModel& model, const std::string& path) { ck::save_model(model, path); });

  m.def(
      "ck_fit",
      [](const ck::Matrix& x, const ck::Vector& y, const ck::ClusterKrigingConfig& c) {
        return ck::ck_fit(make_dataset(x, y), c);
      },
      py::arg("x"), py::arg("y"), py::arg("config") = ck::ClusterKrigingConfig{},
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "ck_predict",
      [](const ck::ClusterKrigingModel& model, const ck::Matrix& q, int threads) {
        const ck::CombinedPrediction p = ck::ck_predict(model, q, threads);
        return py::make_tuple(p.mean, p.variance, p.weights);
      },
      py::arg("model"), py::arg("queries"), py::arg("threads") = 1,
      "Combined (mean, variance, weights) at each query row.");
  m.def("load_model", &ck::load_model, py::arg("path"));

  m.def("r2_score", &ck::r2_score, py::arg("y_true"), py::arg("y_pred"));
  m.def("smse", &ck::smse, py::arg("y_true"), py::arg("y_pred"));
  m.def(
      "msll",
      [](const ck::Vector& y, const ck::Vector& mean, const ck::Vector& var, double train_mean, double train_var) {
        return ck::msll(y, mean, var, train_mean, train_var);
      },
      py::arg("y_true"), py::arg("pred_mean"), py::arg("pred_var"), py::arg("train_mean"), py::arg("train_var"));

  m.def("test_functions", [] {
    std::vector<py::tuple> out;
    for (const auto& f : ck::test_functions()) {
      out.push_back(py::make_tuple(std::string(f.name), f.lower, f.upper, f.two_dimensional));
    }
    return out;
  });
  m.def(
      "synth",
      [](const std::string& name, ck::Index n, ck::Index d, std::uint64_t seed, bool pairwise) {
        const ck::Dataset data = ck::synth_dataset(name, n, d, seed, pairwise);
        return py::make_tuple(data.x(), data.y());
      },
      py::arg("function"), py::arg("n"), py::arg("d"), py::arg("seed") = 0, py::arg("pairwise_extension") = false);
}
