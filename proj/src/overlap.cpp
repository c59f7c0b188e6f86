#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "clusterkriging/error.hpp"
#include "clusterkriging/partition.hpp"

namespace ck {

void MembershipMatrix::validate(double tol) const {
  if (w.cols() < 1) throw InputError("membership matrix has no clusters");
  if (!w.allFinite()) throw InputError("membership matrix contains non-finite values");
  if ((w.array() < -tol).any() || (w.array() > 1.0 + tol).any()) {
    throw InputError("membership weights must lie in [0, 1]");
  }
  for (Index i = 0; i < w.rows(); ++i) {
    if (std::abs(w.row(i).sum() - 1.0) > tol) {
      throw InputError("membership row " + std::to_string(i) + " does not sum to one");
    }
  }
}

Index soft_cluster_size(Index n, Index k, double overlap) {
  if (k < 1) throw ParameterError("cluster count must be positive");
  const double raw = static_cast<double>(n) * overlap / static_cast<double>(k);
  return std::min(n, static_cast<Index>(std::floor(raw + 0.5)));
}

Partitioning overlap_assign(const MembershipMatrix& memberships, double overlap) {
  if (!(overlap >= 1.0 && overlap <= 2.0)) throw ParameterError("overlap factor must lie in [1.0, 2.0]");
  memberships.validate();
  const Index n = memberships.rows();
  const Index k = memberships.clusters();
  const Index size = soft_cluster_size(n, k, overlap);
  const Matrix& w = memberships.w;

  std::vector<char> covered(static_cast<std::size_t>(n), 0);
  Partitioning p;
  p.clusters.resize(static_cast<std::size_t>(k));
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index j = 0; j < k; ++j) {
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return w(a, j) > w(b, j); });
    IndexSet& members = p.clusters[static_cast<std::size_t>(j)];
    members.assign(order.begin(), order.begin() + size);
    for (Index i : members) covered[static_cast<std::size_t>(i)] = 1;
  }
  for (Index i = 0; i < n; ++i) {
    if (covered[static_cast<std::size_t>(i)]) continue;
    Index best = 0;
    w.row(i).maxCoeff(&best);
    p.clusters[static_cast<std::size_t>(best)].push_back(i);
  }
  for (auto& members : p.clusters) std::sort(members.begin(), members.end());
  return p;
}

}  // namespace ck
