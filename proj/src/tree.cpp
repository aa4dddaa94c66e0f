#include "refmargin/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "refmargin/error.hpp"

namespace refmargin {

void GrowthConfig::validate() const {
  if (max_leaves < 2) throw Error(ErrorCode::InvalidConfig, "max_leaves must be at least 2");
  if (min_leaf < 1) throw Error(ErrorCode::InvalidConfig, "min_leaf must be at least 1");
  if (!(lambda_l2 >= 0.0)) throw Error(ErrorCode::InvalidConfig, "lambda_l2 must be nonnegative");
}

// ---------------------------------------------------------------------------
// Tree

Tree::Tree(std::vector<TreeNode> nodes, std::size_t n_features)
    : nodes_(std::move(nodes)), n_features_(n_features) {
  if (nodes_.empty()) throw Error(ErrorCode::SchemaError, "tree has no nodes");
  const auto n = static_cast<int>(nodes_.size());
  std::vector<int> parents(nodes_.size(), 0);
  for (int i = 0; i < n; ++i) {
    const auto& node = nodes_[static_cast<std::size_t>(i)];
    if (node.is_leaf()) continue;
    if (static_cast<std::size_t>(node.feature) >= n_features_) {
      throw Error(ErrorCode::SchemaError, "node " + std::to_string(i) + " splits on feature " +
                                              std::to_string(node.feature) + " of " + std::to_string(n_features_));
    }
    for (int child : {node.left, node.right}) {
      if (child <= 0 || child >= n) {
        throw Error(ErrorCode::SchemaError, "node " + std::to_string(i) + " has invalid child " + std::to_string(child));
      }
      ++parents[static_cast<std::size_t>(child)];
    }
  }
  if (parents[0] != 0) throw Error(ErrorCode::SchemaError, "root has a parent");
  for (int i = 1; i < n; ++i) {
    if (parents[static_cast<std::size_t>(i)] != 1) {
      throw Error(ErrorCode::SchemaError, "node " + std::to_string(i) + " does not have exactly one parent");
    }
  }
  // One parent per node plus an orphan root rules out cycles only if every
  // node is reachable; check that explicitly.
  std::vector<int> stack{0};
  std::size_t seen = 0;
  while (!stack.empty()) {
    const auto& node = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    ++seen;
    if (seen > nodes_.size()) break;
    if (!node.is_leaf()) {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  if (seen != nodes_.size()) throw Error(ErrorCode::SchemaError, "tree has unreachable nodes");
}

Tree Tree::leaf(double value, std::size_t n_features) {
  TreeNode node;
  node.value = value;
  return Tree({node}, n_features);
}

Tree Tree::stump(int feature, double threshold, double left_value, double right_value, std::size_t n_features) {
  TreeNode root;
  root.feature = feature;
  root.threshold = threshold;
  root.left = 1;
  root.right = 2;
  TreeNode left;
  left.value = left_value;
  TreeNode right;
  right.value = right_value;
  return Tree({root, left, right}, n_features);
}

std::size_t Tree::leaf_index(std::span<const double> x) const {
  if (x.size() != n_features_) {
    throw Error(ErrorCode::DimensionMismatch,
                "input has " + std::to_string(x.size()) + " features, tree expects " + std::to_string(n_features_));
  }
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& node = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] < node.threshold ? node.left : node.right);
  }
  return i;
}

double Tree::predict(std::span<const double> x) const { return nodes_[leaf_index(x)].value; }

TreeStats Tree::stats() const {
  TreeStats s;
  s.leaf_count = 0;
  s.min_output = std::numeric_limits<double>::infinity();
  s.max_output = -std::numeric_limits<double>::infinity();
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [index, depth] = stack.back();
    stack.pop_back();
    const auto& node = nodes_[static_cast<std::size_t>(index)];
    if (node.is_leaf()) {
      ++s.leaf_count;
      s.depth = std::max(s.depth, depth);
      s.min_output = std::min(s.min_output, node.value);
      s.max_output = std::max(s.max_output, node.value);
    } else {
      stack.emplace_back(node.left, depth + 1);
      stack.emplace_back(node.right, depth + 1);
    }
  }
  return s;
}

std::pair<double, double> Tree::output_range() const {
  const auto s = stats();
  return {s.min_output, s.max_output};
}

void Tree::clamp_leaf_values(double limit) {
  for (auto& node : nodes_) {
    if (node.is_leaf()) node.value = std::clamp(node.value, -limit, limit);
  }
}

double predict_tree(const Tree& tree, std::span<const double> x) { return tree.predict(x); }

TreeStats tree_stats(const Tree& tree) { return tree.stats(); }

// ---------------------------------------------------------------------------
// Leaf-wise growth

namespace {

struct GiniStat {
  double pos = 0.0;
  double neg = 0.0;

  void add(const GiniStat& o) {
    pos += o.pos;
    neg += o.neg;
  }
  [[nodiscard]] GiniStat minus(const GiniStat& o) const { return {pos - o.pos, neg - o.neg}; }
};

struct GiniCriterion {
  using Stat = GiniStat;
  double lambda = 0.0;

  // Weighted Gini impurity times total weight: W * (1 - p+^2 - p-^2).
  static double impurity(const Stat& s) {
    const double w = s.pos + s.neg;
    return w > 0.0 ? 2.0 * s.pos * s.neg / w : 0.0;
  }
  double gain(const Stat& left, const Stat& right, const Stat& parent) const {
    return impurity(parent) - impurity(left) - impurity(right);
  }
  double leaf_value(const Stat& s) const { return s.pos >= s.neg ? 1.0 : -1.0; }
};

struct NewtonStat {
  double g = 0.0;
  double h = 0.0;

  void add(const NewtonStat& o) {
    g += o.g;
    h += o.h;
  }
  [[nodiscard]] NewtonStat minus(const NewtonStat& o) const { return {g - o.g, h - o.h}; }
};

struct NewtonCriterion {
  using Stat = NewtonStat;
  double lambda = 0.0;

  double score(const Stat& s) const {
    const double denom = s.h + lambda;
    return denom > 0.0 ? s.g * s.g / denom : 0.0;
  }
  double gain(const Stat& left, const Stat& right, const Stat& parent) const {
    return score(left) + score(right) - score(parent);
  }
  double leaf_value(const Stat& s) const {
    const double denom = s.h + lambda;
    return denom > 0.0 ? -s.g / denom : 0.0;
  }
};

struct Candidate {
  bool valid = false;
  int feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

template <class Criterion>
class Grower {
 public:
  using Stat = typename Criterion::Stat;

  Grower(const Dataset& data, std::vector<Stat> row_stats, const GrowthConfig& config, Criterion criterion)
      : data_(data), stats_(std::move(row_stats)), config_(config), criterion_(criterion) {
    const auto m = data_.m();
    const auto d = data_.n_features();
    sorted_.resize(d);
    for (std::size_t f = 0; f < d; ++f) {
      auto& order = sorted_[f];
      order.resize(m);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return data_.features(a)[f] < data_.features(b)[f];
      });
    }
  }

  FitResult grow() {
    const auto m = data_.m();
    std::vector<TreeNode> nodes(1);
    std::vector<int> node_of(m, 0);
    std::vector<SplitRecord> splits;

    Stat total;
    for (const auto& s : stats_) total.add(s);
    std::vector<Stat> node_stat{total};
    std::vector<std::size_t> node_count{m};

    // Open leaves in creation order; ties on gain go to the earliest.
    std::vector<int> open{0};
    std::vector<Candidate> best{evaluate(0, node_of, node_count[0], total)};
    int leaves = 1;

    while (leaves < config_.max_leaves) {
      std::size_t pick = open.size();
      double pick_gain = 0.0;
      for (std::size_t i = 0; i < open.size(); ++i) {
        const auto& c = best[i];
        if (c.valid && c.gain > pick_gain) {
          pick = i;
          pick_gain = c.gain;
        }
      }
      if (pick == open.size()) break;

      const int parent = open[pick];
      const Candidate chosen = best[pick];
      const int left = static_cast<int>(nodes.size());
      const int right = left + 1;
      {
        auto& node = nodes[static_cast<std::size_t>(parent)];
        node.feature = chosen.feature;
        node.threshold = chosen.threshold;
        node.left = left;
        node.right = right;
      }
      nodes.emplace_back();
      nodes.emplace_back();

      Stat left_stat;
      std::size_t left_count = 0;
      for (std::size_t r = 0; r < m; ++r) {
        if (node_of[r] != parent) continue;
        if (data_.features(r)[static_cast<std::size_t>(chosen.feature)] < chosen.threshold) {
          node_of[r] = left;
          left_stat.add(stats_[r]);
          ++left_count;
        } else {
          node_of[r] = right;
        }
      }
      const Stat right_stat = node_stat[static_cast<std::size_t>(parent)].minus(left_stat);
      const std::size_t right_count = node_count[static_cast<std::size_t>(parent)] - left_count;
      node_stat.push_back(left_stat);
      node_stat.push_back(right_stat);
      node_count.push_back(left_count);
      node_count.push_back(right_count);

      splits.push_back({parent, chosen.feature, chosen.threshold, chosen.gain});
      open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
      best.erase(best.begin() + static_cast<std::ptrdiff_t>(pick));
      open.push_back(left);
      best.push_back(evaluate(left, node_of, left_count, left_stat));
      open.push_back(right);
      best.push_back(evaluate(right, node_of, right_count, right_stat));
      ++leaves;
    }

    // Leaf values from exact per-leaf sums recomputed in row order.
    std::vector<Stat> leaf_sum(nodes.size());
    for (std::size_t r = 0; r < m; ++r) leaf_sum[static_cast<std::size_t>(node_of[r])].add(stats_[r]);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].is_leaf()) nodes[i].value = criterion_.leaf_value(leaf_sum[i]);
    }
    return {Tree(std::move(nodes), data_.n_features()), std::move(splits), std::move(node_of)};
  }

 private:
  Candidate evaluate(int node, const std::vector<int>& node_of, std::size_t count, const Stat& parent) const {
    Candidate best;
    const auto min_leaf = static_cast<std::size_t>(config_.min_leaf);
    if (count < 2 * min_leaf) return best;
    std::vector<std::size_t> rows;
    rows.reserve(count);
    for (std::size_t f = 0; f < sorted_.size(); ++f) {
      rows.clear();
      for (auto r : sorted_[f]) {
        if (node_of[r] == node) rows.push_back(r);
      }
      Stat left;
      for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        left.add(stats_[rows[i]]);
        const std::size_t n_left = i + 1;
        if (n_left < min_leaf) continue;
        if (rows.size() - n_left < min_leaf) break;
        const double a = data_.features(rows[i])[f];
        const double b = data_.features(rows[i + 1])[f];
        if (!(a < b)) continue;
        const double g = criterion_.gain(left, parent.minus(left), parent);
        if (!best.valid || g > best.gain) {
          double mid = a + (b - a) / 2.0;
          if (!(mid > a)) mid = b;
          best = {true, static_cast<int>(f), mid, g};
        }
      }
    }
    if (best.valid && !(best.gain > 0.0)) best.valid = false;
    return best;
  }

  const Dataset& data_;
  std::vector<Stat> stats_;
  GrowthConfig config_;
  Criterion criterion_;
  std::vector<std::vector<std::size_t>> sorted_;
};

}  // namespace

FitResult fit_classification_tree_detailed(const Dataset& data, std::span<const double> weights,
                                           const GrowthConfig& config) {
  config.validate();
  if (config.mode != GrowthMode::WeightedClassification) {
    throw Error(ErrorCode::InvalidConfig, "classification tree requires weighted_classification mode");
  }
  if (weights.size() != data.m()) {
    throw Error(ErrorCode::DimensionMismatch, "weights length does not match sample count");
  }
  std::vector<GiniStat> stats(data.m());
  for (std::size_t i = 0; i < data.m(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw Error(ErrorCode::InvalidParams, "weights must be finite and nonnegative");
    }
    if (data.label(i) > 0) {
      stats[i].pos = weights[i];
    } else {
      stats[i].neg = weights[i];
    }
  }
  Grower<GiniCriterion> grower(data, std::move(stats), config, GiniCriterion{config.lambda_l2});
  return grower.grow();
}

Tree fit_classification_tree(const Dataset& data, std::span<const double> weights, const GrowthConfig& config) {
  return fit_classification_tree_detailed(data, weights, config).tree;
}

FitResult fit_regression_tree_detailed(const Dataset& data, std::span<const double> grads,
                                       std::span<const double> hess, const GrowthConfig& config) {
  config.validate();
  if (config.mode != GrowthMode::GradientNewton) {
    throw Error(ErrorCode::InvalidConfig, "regression tree requires gradient_newton mode");
  }
  if (grads.size() != data.m() || hess.size() != data.m()) {
    throw Error(ErrorCode::DimensionMismatch, "gradient/hessian length does not match sample count");
  }
  std::vector<NewtonStat> stats(data.m());
  for (std::size_t i = 0; i < data.m(); ++i) {
    if (!std::isfinite(grads[i])) throw Error(ErrorCode::InvalidParams, "gradients must be finite");
    if (!(hess[i] > 0.0) || !std::isfinite(hess[i])) {
      throw Error(ErrorCode::InvalidParams, "hessians must be finite and positive");
    }
    stats[i] = {grads[i], hess[i]};
  }
  Grower<NewtonCriterion> grower(data, std::move(stats), config, NewtonCriterion{config.lambda_l2});
  return grower.grow();
}

Tree fit_regression_tree(const Dataset& data, std::span<const double> grads, std::span<const double> hess,
                         const GrowthConfig& config) {
  return fit_regression_tree_detailed(data, grads, hess, config).tree;
}

}  // namespace refmargin
