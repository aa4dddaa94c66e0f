#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "refmargin/dataset.hpp"

namespace refmargin {

enum class GrowthMode { WeightedClassification, GradientNewton };

struct GrowthConfig {
  int max_leaves = 2;
  int min_leaf = 20;
  GrowthMode mode = GrowthMode::WeightedClassification;
  double lambda_l2 = 0.0;

  /// Throws InvalidConfig when max_leaves < 2, min_leaf < 1 or lambda_l2 < 0.
  void validate() const;
};

/// A node is a leaf when `feature < 0`. Internal nodes route x to `left`
/// when x[feature] < threshold and to `right` otherwise.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  [[nodiscard]] bool is_leaf() const noexcept { return feature < 0; }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct TreeStats {
  int depth = 0;
  int leaf_count = 1;
  double min_output = 0.0;
  double max_output = 0.0;
};

/// Axis-aligned binary decision tree with real leaf values. Node 0 is the
/// root. Immutable once built except for leaf-value clamping.
class Tree {
 public:
  /// Validates structure: every child index is in range, every non-root
  /// node has exactly one parent, no cycles, and feature indices are below
  /// n_features.
  Tree(std::vector<TreeNode> nodes, std::size_t n_features);

  static Tree leaf(double value, std::size_t n_features);
  static Tree stump(int feature, double threshold, double left_value, double right_value,
                    std::size_t n_features);

  [[nodiscard]] double predict(std::span<const double> x) const;
  /// Index into nodes() of the leaf reached by x.
  [[nodiscard]] std::size_t leaf_index(std::span<const double> x) const;

  [[nodiscard]] const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  [[nodiscard]] std::size_t n_features() const noexcept { return n_features_; }

  [[nodiscard]] TreeStats stats() const;
  [[nodiscard]] int depth() const { return stats().depth; }
  [[nodiscard]] int leaf_count() const { return stats().leaf_count; }
  [[nodiscard]] std::pair<double, double> output_range() const;

  /// Clamps every leaf value into [-limit, limit].
  void clamp_leaf_values(double limit);

  friend bool operator==(const Tree&, const Tree&) = default;

 private:
  std::vector<TreeNode> nodes_;
  std::size_t n_features_ = 0;
};

/// Record of one realized split, in the order growth performed them.
struct SplitRecord {
  int leaf_node = 0;  ///< node index that was split
  int feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

struct FitResult {
  Tree tree;
  std::vector<SplitRecord> splits;
  /// Leaf node index assigned to every training row at fit time.
  std::vector<int> assignment;
};

/// Leaf-wise weighted-Gini tree. Leaves predict the weighted-majority label
/// (+1 on ties). Splits need strictly positive gain and min_leaf rows per side.
FitResult fit_classification_tree_detailed(const Dataset& data, std::span<const double> weights,
                                           const GrowthConfig& config);
Tree fit_classification_tree(const Dataset& data, std::span<const double> weights, const GrowthConfig& config);

/// Leaf-wise second-order regression tree. Leaf value -G/(H+lambda); split
/// gain G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda).
FitResult fit_regression_tree_detailed(const Dataset& data, std::span<const double> grads,
                                       std::span<const double> hess, const GrowthConfig& config);
Tree fit_regression_tree(const Dataset& data, std::span<const double> grads, std::span<const double> hess,
                         const GrowthConfig& config);

double predict_tree(const Tree& tree, std::span<const double> x);
TreeStats tree_stats(const Tree& tree);

}  // namespace refmargin
