#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace ck {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexSet = std::vector<Index>;

/// Inputs X (n rows, d columns) and targets y (n entries).
///
/// Construction validates the shape and that every entry is finite, so a
/// Dataset value is always well-formed.
class Dataset {
 public:
  Dataset() = default;
  Dataset(Matrix x, Vector y);

  const Matrix& x() const noexcept { return x_; }
  const Vector& y() const noexcept { return y_; }
  Index size() const noexcept { return y_.size(); }
  Index dim() const noexcept { return x_.cols(); }
  bool empty() const noexcept { return y_.size() == 0; }

  /// Rows in the given order. Indices must be in range.
  Dataset subset(std::span<const Index> rows) const;

 private:
  Matrix x_;
  Vector y_;
};

/// Throws InputError unless every entry is finite.
void require_finite(const Eigen::Ref<const Matrix>& m, const char* what);

/// Throws InputError unless `points` has `dim` columns.
void require_dim(const Eigen::Ref<const Matrix>& points, Index dim, const char* what);

}  // namespace ck
