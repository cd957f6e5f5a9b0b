#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "meshres/bench.hpp"
#include "meshres/error.hpp"
#include "meshres/pair_features.hpp"
#include "support.hpp"

namespace meshres {
namespace {

PropertySchema one(const char* name) { return PropertySchema::from_names(std::vector<std::string>{name}); }

std::vector<PairFeatureVector> ratio_pairs(const std::vector<double>& ratios, PairLabel label = PairLabel::match) {
  std::vector<PairFeatureVector> out;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    out.push_back({"c" + std::to_string(i), "i" + std::to_string(i), {ratios[i]}, label});
  }
  return out;
}

TEST(PairFeatures, ExamplePairRatios) {
  std::stringstream in(test::slurp(test::fixture("example_pair_properties.csv")));
  const PropertyTable raw = read_property_csv(in, false);
  const PropertyVector cand = normalize_log1p(raw.at("cand-example"));
  const PropertyVector ind = normalize_log1p(raw.at("ind-example"));
  const PairFeatureVector f = pair_features(cand, ind);
  const PropertySchema& s = raw.schema();
  EXPECT_NEAR(f.values[s.require_index("num_vertices")], 1.3548929, 1e-6);
  EXPECT_NEAR(f.values[s.require_index("perimeter")], 1.0000303, 1e-6);
  // fractality is 0 on both sides: guarded 0/0 reads as 1
  EXPECT_EQ(f.values[s.require_index("fractality")], 1.0);
}

TEST(PairFeatures, SelfRatioAndReciprocity) {
  GeneratorConfig cfg;
  cfg.n_entities = 300;
  cfg.seed = 4;
  const Benchmark b = generate_benchmark(cfg);
  const PropertyTable t = featurize(b.index, PropertySchema::full(), true);
  const auto rows = t.rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const PairFeatureVector self = pair_features(rows[i], rows[i]);
    for (double v : self.values) ASSERT_EQ(v, 1.0);
    const PropertyVector& other = rows[(i + 1) % rows.size()];
    const PairFeatureVector ab = pair_features(rows[i], other);
    const PairFeatureVector ba = pair_features(other, rows[i]);
    for (std::size_t j = 0; j < ab.values.size(); ++j) {
      if (rows[i].values[j] > 1e-12 && other.values[j] > 1e-12) {
        EXPECT_NEAR(ab.values[j] * ba.values[j], 1.0, 1e-9);
      }
      EXPECT_GT(ab.values[j], 0.0);
    }
  }
}

TEST(PairFeatures, Contracts) {
  const PropertyVector a{"a", {1.0, 2.0}, true, {}};
  const PropertyVector b{"b", {1.0}, true, {}};
  EXPECT_THROW(pair_features(a, b), SchemaError);
  const PropertyVector raw{"r", {1.0, 2.0}, false, {}};
  EXPECT_THROW(pair_features(raw, a), SchemaError);
  EXPECT_NO_THROW(pair_features(raw, raw, RatioMode::raw_ratio));
  EXPECT_THROW(pair_features(a, a, RatioMode::raw_ratio), SchemaError);
  EXPECT_EQ(parse_ratio_mode(to_string(RatioMode::raw_ratio)), RatioMode::raw_ratio);
}

TEST(EstimateDiscrepancy, IdenticalRatios) {
  const auto pairs = ratio_pairs(std::vector<double>(10, 1.0));
  const std::vector<double> eps{0.001, 0.1, 1.0};
  const DiscrepancyProfile p = estimate_discrepancy(pairs, one("area"), "area", eps);
  EXPECT_EQ(p.r_g, 1.0);
  EXPECT_EQ(p.sigma, 0.0);
  for (const auto& [e, d] : p.curve) EXPECT_EQ(d, 0.0);
}

// Monte-Carlo oracle: for normal ratios the band r_g +/- 2 sigma keeps ~95%.
TEST(EstimateDiscrepancy, NormalRatiosCoverNinetyFivePercent) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> n(1.2, 0.05);
  std::vector<double> r(10000);
  for (double& x : r) x = n(rng);
  const auto pairs = ratio_pairs(r);
  const DiscrepancyProfile p = estimate_discrepancy(pairs, one("area"), "area");
  EXPECT_NEAR(p.r_g, 1.2, 0.012);
  EXPECT_NEAR(p.sigma, 0.05, 0.002);
  const double delta = violation_fraction(r, p.r_g, 2.0 * p.sigma);
  EXPECT_NEAR(delta, 0.05, 0.02);
}

TEST(EstimateDiscrepancy, TwoRatiosRelativeEpsilon) {
  const auto pairs = ratio_pairs({1.0, 2.0});
  const std::vector<double> eps{0.4};
  const DiscrepancyProfile rel = estimate_discrepancy(pairs, one("area"), "area", eps, EpsilonMode::relative);
  EXPECT_EQ(rel.r_g, 1.5);
  EXPECT_EQ(rel.curve[0].second, 0.0);
  const DiscrepancyProfile abs = estimate_discrepancy(pairs, one("area"), "area", eps);
  EXPECT_EQ(abs.curve[0].second, 1.0);
}

TEST(EstimateDiscrepancy, IgnoresNonMatchesAndNeedsTwoMatches) {
  auto pairs = ratio_pairs({1.0, 1.1, 0.9});
  auto noise = ratio_pairs({50.0, 60.0}, PairLabel::non_match);
  pairs.insert(pairs.end(), noise.begin(), noise.end());
  EXPECT_DOUBLE_EQ(estimate_discrepancy(pairs, one("area"), "area").r_g, 1.0);
  EXPECT_THROW(estimate_discrepancy(ratio_pairs({1.0}), one("area"), "area"), Error);
  EXPECT_THROW(estimate_discrepancy({}, one("area"), "area"), Error);
  EXPECT_THROW(estimate_discrepancy(pairs, one("area"), "volume"), SchemaError);
}

TEST(EstimateDiscrepancy, CurveIsMonotoneAndReachesZero) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    std::lognormal_distribution<double> ln(std::uniform_real_distribution<double>(-1, 1)(rng), 0.5);
    std::vector<double> r(2 + t * 7);
    for (double& x : r) x = ln(rng);
    const DiscrepancyProfile p = estimate_discrepancy(ratio_pairs(r), one("area"), "area");
    ASSERT_FALSE(p.curve.empty());
    for (std::size_t i = 0; i < p.curve.size(); ++i) {
      EXPECT_GE(p.curve[i].second, 0.0);
      EXPECT_LE(p.curve[i].second, 1.0);
      if (i > 0) EXPECT_LE(p.curve[i].second, p.curve[i - 1].second);
    }
    EXPECT_EQ(p.curve.back().second, 0.0);
  }
}

TEST(RatioDistribution, SingleBinForIdenticalMeshes) {
  const auto pairs = ratio_pairs(std::vector<double>(25, 1.0));
  const RatioDistribution d = ratio_distribution(pairs, one("area"), "area", 0.01);
  ASSERT_EQ(d.match.size(), 1u);
  EXPECT_EQ(d.match[0].count, 25u);
  EXPECT_LE(d.match[0].start, 1.0);
  EXPECT_GT(d.match[0].end, 1.0);
  EXPECT_TRUE(d.non_match.empty());
  EXPECT_THROW(ratio_distribution(pairs, one("area"), "area", 0.0), DomainError);
}

double binned_variance(const std::vector<HistogramBin>& bins) {
  double n = 0, s = 0, s2 = 0;
  for (const HistogramBin& b : bins) {
    const double mid = 0.5 * (b.start + b.end);
    n += b.count;
    s += b.count * mid;
    s2 += b.count * mid * mid;
  }
  return s2 / n - (s / n) * (s / n);
}

TEST(RatioDistribution, MatchesConcentrateNearOne) {
  GeneratorConfig cfg;
  cfg.n_entities = 400;
  cfg.seed = 12;
  cfg.unmatched_fraction = 0.0;
  const Benchmark b = generate_benchmark(cfg);
  const PropertySchema s = PropertySchema::full();
  const PropertyTable ti = featurize(b.index, s, true);
  const PropertyTable tc = featurize(b.candidates, s, true);
  std::vector<IdPair> ids;
  const auto& m = b.truth.matches();
  for (std::size_t i = 0; i < m.size(); ++i) {
    ids.push_back({m[i].first, m[i].second, PairLabel::match});
    ids.push_back({m[i].first, m[(i + 1) % m.size()].second, PairLabel::non_match});
  }
  const auto pairs = pair_features(tc, ti, ids);
  for (const char* name : {"area", "volume", "convex_hull_area"}) {
    const RatioDistribution d = ratio_distribution(pairs, s, name, 0.01);
    EXPECT_LT(binned_variance(d.match), binned_variance(d.non_match)) << name;
  }
}

TEST(PairCsv, RoundTrip) {
  const PropertySchema s = PropertySchema::from_names(std::vector<std::string>{"area", "volume"});
  const std::vector<PairFeatureVector> pairs{{"c1", "i1", {1.0, 0.1 + 0.2}, PairLabel::match},
                                             {"c1", "i2", {3.5, 1e-12}, PairLabel::non_match},
                                             {"c2", "i3", {2.0, 4.0}, std::nullopt}};
  std::stringstream buf;
  write_pair_csv(buf, s, pairs);
  EXPECT_EQ(buf.str().substr(0, 38), "candidate_id,index_id,label,area,volum");
  PropertySchema back_schema;
  const auto back = read_pair_csv(buf, &back_schema);
  EXPECT_EQ(back_schema, s);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].values, pairs[i].values);
    EXPECT_EQ(back[i].label, pairs[i].label);
  }
}

}  // namespace
}  // namespace meshres
