#include "clusterkriging/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "clusterkriging/error.hpp"

namespace ck {

namespace {

using json = nlohmann::json;

constexpr const char* kFormatName = "clusterkriging-model";

json to_json_vector(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json to_json_matrix(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) rows.push_back(to_json_vector(m.row(i).transpose()));
  return rows;
}

Vector vector_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

Matrix matrix_from(const json& j, Index cols) {
  Matrix m(static_cast<Index>(j.size()), cols);
  for (Index i = 0; i < m.rows(); ++i) {
    const Vector row = vector_from(j.at(static_cast<std::size_t>(i)));
    if (row.size() != cols) throw InputError("model file: ragged matrix");
    m.row(i) = row.transpose();
  }
  return m;
}

json assigner_to_json(const Assigner& assigner) {
  struct Visitor {
    json operator()(const NoAssigner&) const { return {{"kind", "none"}}; }
    json operator()(const KMeansAssigner& a) const {
      return {{"kind", "kmeans"}, {"centroids", to_json_matrix(a.centroids)}};
    }
    json operator()(const FcmAssigner& a) const {
      return {{"kind", "fcm"}, {"centroids", to_json_matrix(a.centroids)}, {"fuzzifier", a.fuzzifier}};
    }
    json operator()(const GaussianMixture& g) const {
      json covs = json::array();
      for (const Matrix& c : g.covariances()) covs.push_back(to_json_matrix(c));
      return {{"kind", "gmm"},
              {"covariance_type", g.covariance_type() == CovarianceType::full ? "full" : "diagonal"},
              {"weights", to_json_vector(g.weights())},
              {"means", to_json_matrix(g.means())},
              {"covariances", covs}};
    }
    json operator()(const RegressionTree& t) const {
      json nodes = json::array();
      for (const auto& n : t.nodes()) {
        nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left},
                         {"right", n.right}, {"leaf", n.leaf}});
      }
      return {{"kind", "tree"}, {"nodes", nodes}};
    }
  };
  return std::visit(Visitor{}, assigner);
}

Assigner assigner_from(const json& j, Index dim) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "none") return NoAssigner{};
  if (kind == "kmeans") return KMeansAssigner{matrix_from(j.at("centroids"), dim)};
  if (kind == "fcm") return FcmAssigner{matrix_from(j.at("centroids"), dim), j.at("fuzzifier").get<double>()};
  if (kind == "gmm") {
    std::vector<Matrix> covs;
    for (const auto& c : j.at("covariances")) covs.push_back(matrix_from(c, dim));
    const auto type = j.at("covariance_type").get<std::string>() == "full" ? CovarianceType::full
                                                                           : CovarianceType::diagonal;
    return GaussianMixture(vector_from(j.at("weights")), matrix_from(j.at("means"), dim), std::move(covs), type);
  }
  if (kind == "tree") {
    std::vector<RegressionTree::Node> nodes;
    for (const auto& n : j.at("nodes")) {
      nodes.push_back({n.at("feature").get<Index>(), n.at("threshold").get<double>(), n.at("left").get<Index>(),
                       n.at("right").get<Index>(), n.at("leaf").get<Index>()});
    }
    return RegressionTree(std::move(nodes), dim);
  }
  throw InputError("model file: unknown assigner kind '" + kind + "'");
}

}  // namespace

std::string model_to_json(const ClusterKrigingModel& model) {
  json clusters = json::array();
  for (const auto& c : model.partitioning().clusters) clusters.push_back(c);
  json models = json::array();
  for (const auto& m : model.models()) {
    models.push_back({{"theta", to_json_vector(m.params().theta)},
                      {"sigma2_eps", m.params().sigma2_eps},
                      {"sigma2_gamma", m.params().sigma2_gamma},
                      {"mu_hat", m.mu_hat()}});
  }
  const json doc = {{"format", kFormatName},
                    {"version", kModelFormatVersion},
                    {"flavor", std::string(to_string(model.flavor()))},
                    {"dim", model.training().dim()},
                    {"training", {{"x", to_json_matrix(model.training().x())}, {"y", to_json_vector(model.training().y())}}},
                    {"clusters", clusters},
                    {"assigner", assigner_to_json(model.partitioning().assigner)},
                    {"models", models}};
  return doc.dump(1);
}

ClusterKrigingModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kFormatName) throw InputError("not a cluster kriging model file");
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw InputError("unsupported model file version " + std::to_string(version));
    }
    const Flavor flavor = parse_flavor(doc.at("flavor").get<std::string>());
    const Index dim = doc.at("dim").get<Index>();
    Dataset training(matrix_from(doc.at("training").at("x"), dim), vector_from(doc.at("training").at("y")));

    Partitioning partitioning;
    for (const auto& c : doc.at("clusters")) partitioning.clusters.push_back(c.get<IndexSet>());
    partitioning.assigner = assigner_from(doc.at("assigner"), dim);

    const json& entries = doc.at("models");
    if (entries.size() != partitioning.clusters.size()) throw InputError("model file: cluster/model count mismatch");
    std::vector<KrigingModel> models;
    for (std::size_t l = 0; l < entries.size(); ++l) {
      const json& e = entries[l];
      KernelParams params{vector_from(e.at("theta")), e.at("sigma2_eps").get<double>(),
                          e.at("sigma2_gamma").get<double>()};
      models.push_back(KrigingModel::condition(training.subset(partitioning.clusters[l]), std::move(params)));
      const double stored = e.at("mu_hat").get<double>();
      if (std::abs(models.back().mu_hat() - stored) > 1e-8 * std::max(1.0, std::abs(stored))) {
        throw InputError("model file: trend of cluster " + std::to_string(l) + " does not match its data");
      }
    }
    return ClusterKrigingModel(flavor, std::move(training), std::move(partitioning), std::move(models));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const ClusterKrigingModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << model_to_json(model) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

ClusterKrigingModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace ck
