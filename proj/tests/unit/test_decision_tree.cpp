#include <gtest/gtest.h>

#include <random>

#include "meshres/decision_tree.hpp"
#include "meshres/error.hpp"

namespace meshres {
namespace {

FeatureMatrix matrix(std::size_t cols, std::vector<double> data) {
  return {data.size() / cols, cols, std::move(data)};
}

std::vector<WeightedRow> all_rows(std::size_t n) {
  std::vector<WeightedRow> rows;
  for (std::uint32_t i = 0; i < n; ++i) rows.push_back({i, 1.0});
  return rows;
}

TEST(GiniTree, MidpointSplitOnSeparableFeature) {
  const FeatureMatrix x = matrix(2, {1.0, 5, 1.05, 3, 1.02, 9, 1.3, 4, 1.5, 8, 1.2, 1});
  const std::vector<std::uint8_t> y{1, 1, 1, 0, 0, 0};
  Rng rng(1);
  std::vector<double> imp(2, 0.0);
  const DecisionTree t = fit_gini_tree(x, y, all_rows(6), {}, rng, imp);
  ASSERT_EQ(t.nodes().size(), 3u);
  EXPECT_EQ(t.nodes()[0].feature, 0);
  EXPECT_DOUBLE_EQ(t.nodes()[0].threshold, (1.05 + 1.2) / 2);
  EXPECT_EQ(t.predict(std::vector<double>{1.0, 0}), 1.0);
  EXPECT_EQ(t.predict(std::vector<double>{2.0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(imp[0], 0.5);  // root Gini 0.5 to two pure leaves
  EXPECT_EQ(imp[1], 0.0);
  EXPECT_EQ(t.depth(), 1u);
  EXPECT_NO_THROW(t.check(2));
  EXPECT_THROW(t.check(0), InvariantError);
}

TEST(GiniTree, WeightsActLikeRepeatedRows) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> data;
  std::vector<std::uint8_t> y;
  for (int i = 0; i < 80; ++i) {
    const double a = u(gen), b = u(gen);
    data.insert(data.end(), {a, b});
    y.push_back(a + 0.3 * b > 0.6 ? 1 : 0);
  }
  const FeatureMatrix x = matrix(2, data);
  std::vector<WeightedRow> weighted;
  std::vector<double> rep_data;
  std::vector<std::uint8_t> rep_y;
  for (std::uint32_t i = 0; i < 80; ++i) {
    const double w = 1 + i % 3;
    weighted.push_back({i, w});
    for (int k = 0; k < w; ++k) {
      rep_data.insert(rep_data.end(), {data[2 * i], data[2 * i + 1]});
      rep_y.push_back(y[i]);
    }
  }
  Rng r1(3), r2(3);
  std::vector<double> i1(2), i2(2);
  TreeParams p;
  p.max_depth = 4;
  const DecisionTree a = fit_gini_tree(x, y, weighted, p, r1, i1);
  const FeatureMatrix xr = matrix(2, rep_data);
  const DecisionTree b = fit_gini_tree(xr, rep_y, all_rows(rep_y.size()), p, r2, i2);
  EXPECT_EQ(a, b);
  EXPECT_NEAR(i1[0], i2[0], 1e-12);
}

TEST(GiniTree, RespectsMaxDepthAndPureNodes) {
  const FeatureMatrix x = matrix(1, {1, 2, 3, 4, 5, 6, 7, 8});
  const std::vector<std::uint8_t> y{0, 1, 0, 1, 0, 1, 0, 1};
  Rng rng(1);
  std::vector<double> imp(1);
  TreeParams p;
  p.max_depth = 2;
  const DecisionTree t = fit_gini_tree(x, y, all_rows(8), p, rng, imp);
  EXPECT_LE(t.depth(), 2u);
  const std::vector<std::uint8_t> pure(8, 1);
  const DecisionTree leaf = fit_gini_tree(x, pure, all_rows(8), p, rng, imp);
  ASSERT_EQ(leaf.nodes().size(), 1u);
  EXPECT_EQ(leaf.nodes()[0].value, 1.0);
}

TEST(NewtonTree, LeafValuesAreRegularizedNewtonSteps) {
  const FeatureMatrix x = matrix(1, {0, 0, 1, 1});
  const std::vector<double> g{-0.5, -0.5, 0.5, 0.5};
  const std::vector<double> h{0.25, 0.25, 0.25, 0.25};
  Rng rng(1);
  std::vector<double> imp(1);
  TreeParams p;
  p.max_depth = 1;
  p.min_leaf_weight = 0.0;
  const DecisionTree t = fit_newton_tree(x, g, h, all_rows(4), p, rng, imp);
  ASSERT_EQ(t.nodes().size(), 3u);
  EXPECT_DOUBLE_EQ(t.predict(std::vector<double>{0.0}), 1.0 / 1.5);
  EXPECT_DOUBLE_EQ(t.predict(std::vector<double>{1.0}), -1.0 / 1.5);
  EXPECT_GT(imp[0], 0.0);
}

}  // namespace
}  // namespace meshres
