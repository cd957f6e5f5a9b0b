#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "meshres/random.hpp"

namespace meshres {

// Internal nodes route x[feature] <= threshold to the left child. Leaves
// have feature == -1 and carry `value`: the match probability for
// classification trees, the additive score for boosting trees.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(std::vector<TreeNode> nodes, std::size_t max_depth);

  double predict(std::span<const double> x) const;
  std::span<const TreeNode> nodes() const noexcept { return nodes_; }
  std::size_t max_depth() const noexcept { return max_depth_; }
  std::size_t depth() const;

  // Throws InvariantError unless the nodes form a tree rooted at 0 with
  // features below `num_features`.
  void check(std::size_t num_features) const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
  std::size_t max_depth_ = 0;
};

// Dense row-major design matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  const double* row(std::size_t i) const { return data.data() + i * cols; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

// A training row with its multiplicity (bootstrap count).
struct WeightedRow {
  std::uint32_t row = 0;
  double weight = 1.0;
};

struct TreeParams {
  std::size_t max_depth = 8;
  std::size_t min_samples_split = 2;
  double min_leaf_weight = 1.0;
  std::size_t max_features = 0;  // features tried per split; 0 means all
  double l2 = 1.0;               // leaf regularization, boosting only
};

// CART classification tree, Gini impurity, midpoint thresholds between
// consecutive distinct values. Adds each split's weighted impurity decrease
// (relative to the total root weight) to `importance[feature]`.
DecisionTree fit_gini_tree(const FeatureMatrix& x, std::span<const std::uint8_t> labels,
                           std::vector<WeightedRow> rows, const TreeParams& params, Rng& rng,
                           std::vector<double>& importance);

// Regression tree on first and second loss derivatives with Newton leaf
// values -G/(H + l2); importance accumulates split gains.
DecisionTree fit_newton_tree(const FeatureMatrix& x, std::span<const double> gradients,
                             std::span<const double> hessians, std::vector<WeightedRow> rows,
                             const TreeParams& params, Rng& rng, std::vector<double>& importance);

}  // namespace meshres
