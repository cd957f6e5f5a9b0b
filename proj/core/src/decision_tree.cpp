#include "meshres/decision_tree.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "meshres/error.hpp"

namespace meshres {

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::size_t max_depth)
    : nodes_(std::move(nodes)), max_depth_(max_depth) {}

double DecisionTree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const TreeNode& n = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes_[i].value;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes_[i].is_leaf()) {
      stack.emplace_back(static_cast<std::size_t>(nodes_[i].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes_[i].right), d + 1);
    }
  }
  return deepest;
}

void DecisionTree::check(std::size_t num_features) const {
  if (nodes_.empty()) throw InvariantError("decision tree has no nodes");
  std::vector<int> parents(nodes_.size(), 0);
  for (const TreeNode& n : nodes_) {
    if (n.is_leaf()) continue;
    if (static_cast<std::size_t>(n.feature) >= num_features) {
      throw InvariantError("tree feature id " + std::to_string(n.feature) + " out of range");
    }
    for (std::int32_t child : {n.left, n.right}) {
      if (child <= 0 || static_cast<std::size_t>(child) >= nodes_.size()) {
        throw InvariantError("tree child index out of range");
      }
      ++parents[static_cast<std::size_t>(child)];
    }
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (parents[i] != 1) throw InvariantError("tree node " + std::to_string(i) + " is not reachable once");
  }
}

namespace {

struct GiniStats {
  double w = 0.0;
  double pos = 0.0;

  void add(double weight, double a, double) {
    w += weight;
    pos += weight * a;
  }
  void remove(const GiniStats& o) {
    w -= o.w;
    pos -= o.pos;
  }
  // Weighted impurity mass w * gini.
  double loss(double) const { return w > 0.0 ? 2.0 * pos * (w - pos) / w : 0.0; }
  double leaf(double) const { return w > 0.0 ? std::clamp(pos / w, 0.0, 1.0) : 0.0; }
  double hessian() const { return w; }
};

struct NewtonStats {
  double w = 0.0;
  double g = 0.0;
  double h = 0.0;

  void add(double weight, double a, double b) {
    w += weight;
    g += weight * a;
    h += weight * b;
  }
  void remove(const NewtonStats& o) {
    w -= o.w;
    g -= o.g;
    h -= o.h;
  }
  double loss(double l2) const { return -g * g / (h + l2); }
  double leaf(double l2) const { return -g / (h + l2); }
  double hessian() const { return h; }
};

template <class Stats>
class Builder {
 public:
  Builder(const FeatureMatrix& x, std::span<const double> a, std::span<const double> b,
          const TreeParams& params, Rng& rng, std::vector<double>& importance)
      : x_(x), a_(a), b_(b), params_(params), rng_(rng), importance_(importance) {
    if (importance_.size() != x_.cols) importance_.assign(x_.cols, 0.0);
    features_.resize(x_.cols);
    std::iota(features_.begin(), features_.end(), std::size_t{0});
  }

  DecisionTree build(std::vector<WeightedRow> rows) {
    root_weight_ = 0.0;
    for (const WeightedRow& r : rows) root_weight_ += r.weight;
    grow(rows, 0);
    return DecisionTree(std::move(nodes_), params_.max_depth);
  }

 private:
  Stats stats_of(const std::vector<WeightedRow>& rows) const {
    Stats s;
    for (const WeightedRow& r : rows) s.add(r.weight, a_[r.row], b_.empty() ? 0.0 : b_[r.row]);
    return s;
  }

  std::int32_t grow(std::vector<WeightedRow>& rows, std::size_t depth) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();
    const Stats total = stats_of(rows);
    nodes_[static_cast<std::size_t>(id)].value = total.leaf(params_.l2);

    if (depth >= params_.max_depth || rows.size() < params_.min_samples_split) return id;
    const double parent_loss = total.loss(params_.l2);

    std::size_t tried = x_.cols;
    if (params_.max_features > 0 && params_.max_features < x_.cols) {
      tried = params_.max_features;
      for (std::size_t i = 0; i < tried; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, x_.cols - 1);
        std::swap(features_[i], features_[pick(rng_)]);
      }
    } else {
      std::iota(features_.begin(), features_.end(), std::size_t{0});
    }

    double best_gain = 1e-12;
    std::int32_t best_feature = -1;
    double best_threshold = 0.0;
    std::vector<WeightedRow> sorted = rows;
    for (std::size_t t = 0; t < tried; ++t) {
      const std::size_t f = features_[t];
      std::sort(sorted.begin(), sorted.end(), [&](const WeightedRow& l, const WeightedRow& r) {
        const double vl = x_.at(l.row, f);
        const double vr = x_.at(r.row, f);
        return vl < vr || (vl == vr && l.row < r.row);
      });
      Stats left;
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        const WeightedRow& r = sorted[i];
        left.add(r.weight, a_[r.row], b_.empty() ? 0.0 : b_[r.row]);
        const double lo = x_.at(r.row, f);
        const double hi = x_.at(sorted[i + 1].row, f);
        if (!(lo < hi)) continue;
        Stats right = total;
        right.remove(left);
        if (left.w < params_.min_leaf_weight || right.w < params_.min_leaf_weight) continue;
        if constexpr (std::is_same_v<Stats, NewtonStats>) {
          if (left.hessian() < 1e-9 || right.hessian() < 1e-9) continue;
        }
        const double gain = parent_loss - left.loss(params_.l2) - right.loss(params_.l2);
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<std::int32_t>(f);
          double mid = lo + (hi - lo) / 2.0;
          if (!(mid < hi)) mid = lo;
          best_threshold = mid;
        }
      }
    }
    if (best_feature < 0) return id;

    importance_[static_cast<std::size_t>(best_feature)] += best_gain / root_weight_;
    std::vector<WeightedRow> left_rows, right_rows;
    for (const WeightedRow& r : rows) {
      (x_.at(r.row, static_cast<std::size_t>(best_feature)) <= best_threshold ? left_rows : right_rows)
          .push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    sorted.clear();
    sorted.shrink_to_fit();

    const std::int32_t l = grow(left_rows, depth + 1);
    const std::int32_t r = grow(right_rows, depth + 1);
    TreeNode& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    node.value = 0.0;
    return id;
  }

  const FeatureMatrix& x_;
  std::span<const double> a_;
  std::span<const double> b_;
  const TreeParams& params_;
  Rng& rng_;
  std::vector<double>& importance_;
  std::vector<std::size_t> features_;
  std::vector<TreeNode> nodes_;
  double root_weight_ = 0.0;
};

void check_rows(const FeatureMatrix& x, std::size_t targets, const std::vector<WeightedRow>& rows) {
  if (targets != x.rows) throw InvariantError("target length does not match the design matrix");
  if (rows.empty()) throw InvariantError("cannot fit a tree on zero rows");
  for (const WeightedRow& r : rows) {
    if (r.row >= x.rows || !(r.weight > 0.0)) throw InvariantError("invalid weighted training row");
  }
}

}  // namespace

DecisionTree fit_gini_tree(const FeatureMatrix& x, std::span<const std::uint8_t> labels,
                           std::vector<WeightedRow> rows, const TreeParams& params, Rng& rng,
                           std::vector<double>& importance) {
  check_rows(x, labels.size(), rows);
  std::vector<double> y(labels.begin(), labels.end());
  Builder<GiniStats> builder(x, y, {}, params, rng, importance);
  return builder.build(std::move(rows));
}

DecisionTree fit_newton_tree(const FeatureMatrix& x, std::span<const double> gradients,
                             std::span<const double> hessians, std::vector<WeightedRow> rows,
                             const TreeParams& params, Rng& rng, std::vector<double>& importance) {
  check_rows(x, gradients.size(), rows);
  if (hessians.size() != gradients.size()) throw InvariantError("gradient/hessian length mismatch");
  Builder<NewtonStats> builder(x, gradients, hessians, params, rng, importance);
  return builder.build(std::move(rows));
}

}  // namespace meshres
