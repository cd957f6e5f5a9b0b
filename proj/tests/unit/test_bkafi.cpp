#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "meshres/bkafi.hpp"
#include "meshres/error.hpp"
#include "meshres/pipeline.hpp"
#include "support.hpp"

namespace meshres {
namespace {

struct Fixture {
  Benchmark bench;
  FeatureTables tables;
};

Fixture make(std::size_t n, std::uint64_t seed, double sigma = 0.02) {
  GeneratorConfig g;
  g.n_entities = n;
  g.seed = seed;
  g.footprint.sigma = sigma;
  g.height.sigma = sigma;
  Fixture f{generate_benchmark(g), {}};
  f.tables = featurize_benchmark(f.bench, PropertySchema::full());
  return f;
}

std::vector<std::size_t> identity(std::size_t n) {
  std::vector<std::size_t> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = i;
  return r;
}

TEST(BlockingKey, FromRankingAndBounds) {
  const auto ranking = std::vector<std::size_t>{4, 1, 7, 0};
  const BlockingKey k = key_from_ranking(ranking, 2, KeyCriterion::ratio_std);
  EXPECT_EQ(k.feature_ids, (std::vector<std::size_t>{4, 1}));
  EXPECT_EQ(k.names(PropertySchema::full()), (std::vector<std::string>{"perimeter", "area"}));
  EXPECT_THROW(key_from_ranking(ranking, 0, KeyCriterion::ratio_std), DomainError);
  EXPECT_THROW(key_from_ranking(ranking, 5, KeyCriterion::ratio_std), DomainError);
  EXPECT_EQ(parse_key_criterion("std"), KeyCriterion::ratio_std);
  EXPECT_EQ(parse_key_criterion("importance"), KeyCriterion::feature_importance);
  EXPECT_THROW(parse_key_criterion("random"), SchemaError);
}

TEST(BlockingKey, ImportanceKeyFromSeparableModel) {
  const PropertySchema s = PropertySchema::from_names(std::vector<std::string>{"area", "volume", "height_diff"});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  std::vector<PairFeatureVector> pairs;
  for (int i = 0; i < 200; ++i) {
    const double h = u(rng);
    pairs.push_back({"c", "i", {u(rng), u(rng), h}, h < 1.1 ? PairLabel::match : PairLabel::non_match});
  }
  const TrainedMatcher m = train_matcher(pairs, s, MatcherConfig::defaults(EnsembleKind::random_forest));
  EXPECT_EQ(select_blocking_key(m, 1).feature_ids[0], 2u);
  const BlockingKey full = select_blocking_key(m, 3);
  EXPECT_EQ(full.size(), 3u);
  EXPECT_EQ(std::set<std::size_t>(full.feature_ids.begin(), full.feature_ids.end()).size(), 3u);
  EXPECT_EQ(full.feature_ids, rank_features(m));
}

TEST(BlockingKey, StdCriterionPrefersZeroVariance) {
  const PropertySchema s = PropertySchema::from_names(std::vector<std::string>{"area", "volume", "height_diff"});
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(1.0, 0.05);
  std::vector<PairFeatureVector> pairs;
  for (int i = 0; i < 100; ++i) pairs.push_back({"c", "i", {n(rng), 1.0, n(rng)}, PairLabel::match});
  std::vector<DiscrepancyProfile> profiles;
  for (std::size_t i = 0; i < 3; ++i) profiles.push_back(estimate_discrepancy(pairs, s, s.name(i)));
  const BlockingKey k = select_blocking_key(profiles, s, 2);
  EXPECT_EQ(k.feature_ids[0], 1u);
  EXPECT_EQ(k.criterion, KeyCriterion::ratio_std);
}

TEST(BlockingIndex, Contracts) {
  const Fixture f = make(50, 1);
  const BlockingKey key = key_from_ranking(identity(20), 3, KeyCriterion::feature_importance);
  EXPECT_THROW(BlockingIndex(PropertyTable(PropertySchema::full(), true), key), DomainError);
  EXPECT_THROW(BlockingIndex(f.tables.index_raw, key), SchemaError);
  BlockingKey bad = key;
  bad.feature_ids = {25};
  EXPECT_THROW(BlockingIndex(f.tables.index, bad), SchemaError);
  const BlockingIndex idx(f.tables.index, key);
  EXPECT_EQ(idx.size(), f.tables.index.size());
  std::set<std::string> ids;
  for (std::size_t i = 0; i < idx.size(); ++i) ids.insert(idx.tree().id(i));
  EXPECT_EQ(ids.size(), idx.size());
}

TEST(GenerateCandidates, ContainmentGivesPerfectFirstNeighbour) {
  const Fixture f = make(200, 2);
  const PropertyTable& idx = f.tables.index;
  // candidates are exact copies of a subset of the index vectors
  const std::vector<std::string> ids{idx.rows()[3].mesh_id, idx.rows()[50].mesh_id, idx.rows()[99].mesh_id};
  const PropertyTable cands = idx.subset(ids);
  GroundTruth truth;
  for (const auto& id : ids) truth.add_match(id, id);
  for (std::size_t fb : {1, 3, 20}) {
    const BlockingIndex index(idx, key_from_ranking(identity(20), fb, KeyCriterion::feature_importance));
    const CandidateSet set = generate_candidates(cands, index, 4);
    for (const CandidatePair& p : set.pairs) {
      if (p.rank == 1) EXPECT_EQ(p.distance, 0.0);
    }
    if (fb > 1) EXPECT_EQ(blocking_metrics(set, truth, 3, idx.size(), std::vector<std::size_t>{1}).pc_at_k.at(1), 100.0);
  }
}

TEST(GenerateCandidates, ExhaustiveBlockingFindsEverything) {
  const Fixture f = make(150, 3, 0.2);
  const BlockingIndex index(f.tables.index, key_from_ranking(identity(20), 20, KeyCriterion::feature_importance));
  const CandidateSet set = generate_candidates(f.tables.candidates, index, f.tables.index.size());
  const MetricsReport r = blocking_metrics(set, f.bench.truth, f.tables.candidates.size(), f.tables.index.size());
  EXPECT_EQ(*r.pc, 100.0);
  EXPECT_EQ(*r.rr, 0.0);
}

TEST(GenerateCandidates, ClampsLargeK) {
  const Fixture f = make(30, 4);
  const BlockingIndex index(f.tables.index, key_from_ranking(identity(20), 3, KeyCriterion::feature_importance));
  std::vector<std::string> warnings;
  const CandidateSet set = generate_candidates(f.tables.candidates, index, 1000, false, &warnings);
  EXPECT_EQ(set.k, f.tables.index.size());
  EXPECT_EQ(warnings.size(), 1u);
  EXPECT_THROW(generate_candidates(f.tables.candidates, index, 0), DomainError);
}

TEST(GenerateCandidates, MonotoneInKAndPruningIsAPrefix) {
  const Fixture f = make(300, 5, 0.05);
  const BlockingKey key = key_from_ranking(identity(20), 4, KeyCriterion::feature_importance);
  BlockingIndex index(f.tables.index, key);
  const CandidateSet k3 = generate_candidates(f.tables.candidates, index, 3);
  const CandidateSet k10 = generate_candidates(f.tables.candidates, index, 10);
  std::set<std::pair<std::string, std::string>> big;
  for (const auto& p : k10.pairs) big.insert({p.candidate_id, p.index_id});
  for (const auto& p : k3.pairs) EXPECT_TRUE(big.count({p.candidate_id, p.index_id}));
  EXPECT_NO_THROW(k10.check());

  const std::vector<IdPair> matches = [&] {
    std::vector<IdPair> m;
    for (const auto& [c, i] : f.bench.truth.matches()) m.push_back({c, i, PairLabel::match});
    return m;
  }();
  const auto dists = match_distances(f.tables.candidates, f.tables.index, matches, key);
  for (double q : {0.0, 0.5, 0.95, 1.0}) {
    index.set_prune_threshold(calibrate_threshold(dists, q));
    const CandidateSet pruned = generate_candidates(f.tables.candidates, index, 10, true);
    EXPECT_TRUE(pruned.pruned);
    // exactly the unpruned prefix up to the threshold
    std::size_t j = 0;
    for (const auto& p : k10.pairs) {
      if (p.distance <= *index.prune_threshold()) {
        ASSERT_LT(j, pruned.size());
        EXPECT_EQ(pruned.pairs[j].index_id, p.index_id);
        ++j;
      }
    }
    EXPECT_EQ(j, pruned.size());
  }
}

TEST(CalibrateThreshold, LinearQuantiles) {
  const std::vector<double> d{4.0, 1.0, 3.0, 2.0};
  EXPECT_EQ(calibrate_threshold(d, 0.0), 1.0);
  EXPECT_EQ(calibrate_threshold(d, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(calibrate_threshold(d, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(calibrate_threshold(d, 0.95), 3.85);
  EXPECT_THROW(calibrate_threshold({}, 0.5), DomainError);
  EXPECT_THROW(calibrate_threshold(d, 1.5), DomainError);
}

TEST(Sweep, ExhaustiveGridAndMonotonePc) {
  const Fixture f = make(200, 6, 0.05);
  const std::vector<std::size_t> ks{1, 2, 5, 10, f.tables.index.size()};
  const std::vector<std::size_t> fbs{1, 3, 20};
  const auto points = sweep(f.tables.candidates, f.tables.index, identity(20), KeyCriterion::feature_importance, ks,
                            fbs, f.bench.truth);
  ASSERT_EQ(points.size(), ks.size() * fbs.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].k == f.tables.index.size()) EXPECT_EQ(points[i].pc, 100.0);
    if (i > 0 && points[i].fb == points[i - 1].fb) EXPECT_GE(points[i].pc, points[i - 1].pc);
  }
  std::stringstream with, without;
  write_sweep_csv(with, points);
  write_sweep_csv(without, points, false);
  EXPECT_EQ(without.str().substr(0, 13), "fb,k,pc,rr\n1,");
  EXPECT_NE(with.str(), without.str());
}

}  // namespace
}  // namespace meshres
