#pragma once

#include <string>

#include "clusterkriging/cluster_kriging.hpp"

namespace ck {

/// Current version of the model file format.
inline constexpr int kModelFormatVersion = 1;

/// Self-describing JSON document holding the flavor, the partition artifact,
/// per-cluster kernel parameters and trend, the training rows and each
/// cluster's row indices. Doubles are written in shortest round-trip form, so
/// a loaded model predicts bit-identically to the saved one.
std::string model_to_json(const ClusterKrigingModel& model);
ClusterKrigingModel model_from_json(const std::string& text);

void save_model(const ClusterKrigingModel& model, const std::string& path);
ClusterKrigingModel load_model(const std::string& path);

}  // namespace ck
