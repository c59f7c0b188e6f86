#include <algorithm>
#include <numeric>
#include <optional>
#include <string>

#include "clusterkriging/error.hpp"
#include "clusterkriging/partition.hpp"

namespace ck {

RegressionTree::RegressionTree(std::vector<Node> nodes, Index dim) : nodes_(std::move(nodes)), dim_(dim) {
  if (nodes_.empty()) throw InputError("regression tree needs at least one node");
  const auto count = static_cast<Index>(nodes_.size());
  for (const Node& node : nodes_) {
    if (node.feature < 0) {
      if (node.leaf != leaves_) throw InputError("regression tree leaves must be numbered in node order");
      ++leaves_;
    } else if (node.feature >= dim_ || node.left <= 0 || node.left >= count || node.right <= 0 ||
               node.right >= count) {
      throw InputError("regression tree has an invalid internal node");
    }
  }
}

Index RegressionTree::route(const Eigen::Ref<const Vector>& point) const {
  Index at = 0;
  while (nodes_[static_cast<std::size_t>(at)].feature >= 0) {
    const Node& node = nodes_[static_cast<std::size_t>(at)];
    at = point(node.feature) <= node.threshold ? node.left : node.right;
  }
  return nodes_[static_cast<std::size_t>(at)].leaf;
}

std::vector<Index> tree_route(const RegressionTree& tree, const Eigen::Ref<const Matrix>& points) {
  require_dim(points, tree.dim(), "tree query points");
  std::vector<Index> out(static_cast<std::size_t>(points.rows()));
  for (Index i = 0; i < points.rows(); ++i) out[static_cast<std::size_t>(i)] = tree.route(points.row(i).transpose());
  return out;
}

namespace {

struct Split {
  Index feature = -1;
  double threshold = 0.0;
  double reduction = 0.0;
  IndexSet left;
  IndexSet right;
};

// Best variance-reduction split of `rows`; ties go to the lowest feature, then
// the lowest threshold.
std::optional<Split> best_split(const Dataset& data, const IndexSet& rows, Index min_leaf) {
  const auto m = static_cast<Index>(rows.size());
  if (m < 2 * min_leaf) return std::nullopt;
  const Matrix& x = data.x();
  const Vector& y = data.y();

  double lo = y(rows[0]);
  double hi = lo;
  double mean = 0.0;
  for (Index r : rows) {
    lo = std::min(lo, y(r));
    hi = std::max(hi, y(r));
    mean += y(r);
  }
  if (lo == hi) return std::nullopt;
  mean /= static_cast<double>(m);
  double sse = 0.0;
  for (Index r : rows) sse += (y(r) - mean) * (y(r) - mean);

  std::optional<Split> best;
  double best_reduction = 1e-12 * sse;
  Index best_pos = -1;
  IndexSet best_order;
  IndexSet order = rows;
  for (Index f = 0; f < data.dim(); ++f) {
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return x(a, f) < x(b, f); });
    double sum_left = 0.0;
    double sq_left = 0.0;
    const double total_sum = [&] {
      double s = 0.0;
      for (Index r : order) s += y(r) - mean;
      return s;
    }();
    for (Index p = 1; p < m; ++p) {
      const double c = y(order[static_cast<std::size_t>(p - 1)]) - mean;
      sum_left += c;
      sq_left += c * c;
      if (p < min_leaf || m - p < min_leaf) continue;
      const double a = x(order[static_cast<std::size_t>(p - 1)], f);
      const double b = x(order[static_cast<std::size_t>(p)], f);
      if (!(a < b)) continue;
      const double nl = static_cast<double>(p);
      const double nr = static_cast<double>(m - p);
      const double sum_right = total_sum - sum_left;
      // sse - sse_left - sse_right, with the node mean already removed
      const double reduction = sum_left * sum_left / nl + sum_right * sum_right / nr -
                               total_sum * total_sum / static_cast<double>(m);
      if (reduction > best_reduction) {
        best_reduction = reduction;
        double threshold = 0.5 * (a + b);
        if (!(threshold < b)) threshold = a;
        best = Split{f, threshold, reduction, {}, {}};
        best_pos = p;
        best_order = order;
      }
    }
  }
  if (!best) return std::nullopt;
  best->left.assign(best_order.begin(), best_order.begin() + best_pos);
  best->right.assign(best_order.begin() + best_pos, best_order.end());
  std::sort(best->left.begin(), best->left.end());
  std::sort(best->right.begin(), best->right.end());
  return best;
}

}  // namespace

TreeResult tree_partition(const Dataset& data, Index max_leaves, Index min_leaf_size) {
  if (max_leaves < 1) throw ParameterError("max_leaves must be at least 1");
  if (min_leaf_size < 2) throw ParameterError("min_leaf_size must be at least 2");

  struct Work {
    IndexSet rows;
    std::optional<Split> split;
  };
  using Node = RegressionTree::Node;
  std::vector<Node> nodes(1);
  std::vector<Work> work(1);
  work[0].rows.resize(static_cast<std::size_t>(data.size()));
  std::iota(work[0].rows.begin(), work[0].rows.end(), Index{0});
  work[0].split = best_split(data, work[0].rows, min_leaf_size);

  Index leaves = 1;
  while (leaves < max_leaves) {
    Index pick = -1;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].feature >= 0 || !work[i].split) continue;
      if (pick < 0 || work[i].split->reduction > work[static_cast<std::size_t>(pick)].split->reduction) {
        pick = static_cast<Index>(i);
      }
    }
    if (pick < 0) break;

    Split split = std::move(*work[static_cast<std::size_t>(pick)].split);
    work[static_cast<std::size_t>(pick)].split.reset();
    const auto left = static_cast<Index>(nodes.size());
    Node& parent = nodes[static_cast<std::size_t>(pick)];
    parent.feature = split.feature;
    parent.threshold = split.threshold;
    parent.left = left;
    parent.right = left + 1;
    nodes.emplace_back();
    nodes.emplace_back();
    Work wl{std::move(split.left), std::nullopt};
    Work wr{std::move(split.right), std::nullopt};
    wl.split = best_split(data, wl.rows, min_leaf_size);
    wr.split = best_split(data, wr.rows, min_leaf_size);
    work.push_back(std::move(wl));
    work.push_back(std::move(wr));
    ++leaves;
  }

  Partitioning partitioning;
  Index leaf = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].feature >= 0) continue;
    nodes[i].leaf = leaf++;
    partitioning.clusters.push_back(std::move(work[i].rows));
  }
  RegressionTree tree(std::move(nodes), data.dim());
  partitioning.assigner = tree;
  return TreeResult{std::move(tree), std::move(partitioning)};
}

}  // namespace ck
