#include "clusterkriging/dataset.hpp"

#include <string>

#include "clusterkriging/error.hpp"

namespace ck {

Dataset::Dataset(Matrix x, Vector y) : x_(std::move(x)), y_(std::move(y)) {
  if (y_.size() < 1) throw InputError("dataset must contain at least one row");
  if (x_.rows() != y_.size()) {
    throw InputError("dataset has " + std::to_string(x_.rows()) + " input rows but " +
                     std::to_string(y_.size()) + " targets");
  }
  if (x_.cols() < 1) throw InputError("dataset must have at least one input column");
  require_finite(x_, "dataset inputs");
  require_finite(y_, "dataset targets");
}

Dataset Dataset::subset(std::span<const Index> rows) const {
  Matrix xs(static_cast<Index>(rows.size()), dim());
  Vector ys(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Index r = rows[i];
    if (r < 0 || r >= size()) throw InputError("row index " + std::to_string(r) + " out of range");
    xs.row(static_cast<Index>(i)) = x_.row(r);
    ys(static_cast<Index>(i)) = y_(r);
  }
  return Dataset(std::move(xs), std::move(ys));
}

void require_finite(const Eigen::Ref<const Matrix>& m, const char* what) {
  if (!m.allFinite()) throw InputError(std::string(what) + " contain non-finite values");
}

void require_dim(const Eigen::Ref<const Matrix>& points, Index dim, const char* what) {
  if (points.cols() != dim) {
    throw InputError(std::string(what) + " have dimension " + std::to_string(points.cols()) +
                     ", expected " + std::to_string(dim));
  }
}

}  // namespace ck
