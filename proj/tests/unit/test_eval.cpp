#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "meshres/error.hpp"
#include "meshres/eval.hpp"

namespace meshres {
namespace {

CandidateSet cross_product(std::size_t nc, std::size_t ni) {
  CandidateSet s;
  s.k = ni;
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t i = 0; i < ni; ++i) {
      s.pairs.push_back({"c" + std::to_string(c), "i" + std::to_string(i), static_cast<double>(i), i + 1});
    }
  }
  return s;
}

GroundTruth diagonal(std::size_t n) {
  GroundTruth t;
  for (std::size_t i = 0; i < n; ++i) t.add_match("c" + std::to_string(i), "i" + std::to_string(i));
  return t;
}

TEST(ReductionRatio, LargeSetArithmetic) {
  EXPECT_NEAR(reduction_ratio(20 * 3507, 3507, 9985), 99.7997, 1e-4);
  EXPECT_EQ(reduction_ratio(0, 10, 10), 100.0);
  EXPECT_EQ(reduction_ratio(100, 10, 10), 0.0);
  EXPECT_THROW(reduction_ratio(1, 0, 10), DomainError);
}

TEST(BlockingMetrics, FullCrossProductAndEmptySet) {
  const GroundTruth truth = diagonal(4);
  const MetricsReport full = blocking_metrics(cross_product(4, 6), truth, 4, 6, std::vector<std::size_t>{1, 6});
  EXPECT_EQ(*full.rr, 0.0);
  EXPECT_EQ(*full.pc, 100.0);
  EXPECT_EQ(full.pc_at_k.at(6), 100.0);
  EXPECT_EQ(full.pc_at_k.at(1), 25.0);  // only c0's first neighbour is i0
  const MetricsReport empty = blocking_metrics(CandidateSet{}, truth, 4, 6);
  EXPECT_EQ(*empty.rr, 100.0);
  EXPECT_EQ(*empty.pc, 0.0);
  EXPECT_THROW(pair_completeness(cross_product(2, 2), GroundTruth{}), DomainError);
}

TEST(BlockingMetrics, UnmatchedCandidatesOnlyCountInRr) {
  GroundTruth truth = diagonal(2);
  truth.add_unmatched("c2");
  const CandidateSet s = cross_product(3, 2).truncated(1);
  const MetricsReport r = blocking_metrics(s, truth, 3, 2);
  EXPECT_EQ(*r.pc, 50.0);
  EXPECT_DOUBLE_EQ(*r.rr, 50.0);
}

TEST(BlockingMetrics, PcIsMonotoneUnderSupersets) {
  std::mt19937_64 rng(1);
  const GroundTruth truth = diagonal(30);
  const CandidateSet full = cross_product(30, 30);
  std::vector<std::size_t> ks;
  for (std::size_t k = 1; k <= 30; ++k) ks.push_back(k);
  const MetricsReport r = blocking_metrics(full, truth, 30, 30, ks);
  double prev = 0.0;
  for (const auto& [k, pc] : r.pc_at_k) {
    EXPECT_GE(pc, prev);
    prev = pc;
  }
  EXPECT_EQ(prev, 100.0);
  // subsets by random thinning
  for (int t = 0; t < 20; ++t) {
    CandidateSet sub;
    sub.k = 30;
    for (const auto& p : full.pairs) {
      if (rng() % 3 != 0) sub.pairs.push_back(p);
    }
    EXPECT_LE(pair_completeness(sub, truth), 100.0);
    CandidateSet subsub;
    subsub.k = 30;
    for (const auto& p : sub.pairs) {
      if (rng() % 2 == 0) subsub.pairs.push_back(p);
    }
    EXPECT_LE(pair_completeness(subsub, truth), pair_completeness(sub, truth));
  }
}

TEST(PruningMetrics, Examples) {
  const GroundTruth truth = diagonal(4);
  const CandidateSet unpruned = cross_product(4, 5).truncated(3);
  const PruningMetrics same = pruning_metrics(unpruned, unpruned, truth, 4);
  EXPECT_DOUBLE_EQ(same.rr_k, 1.0 - 12.0 / 12.0);
  EXPECT_EQ(same.pc_k, 1.0);
  const CandidateSet pruned = unpruned.truncated(1);
  const PruningMetrics p = pruning_metrics(pruned, unpruned, truth, 4);
  EXPECT_DOUBLE_EQ(p.rr_k, 1.0 - 4.0 / 12.0);
  EXPECT_DOUBLE_EQ(p.pc_k, 25.0 / 75.0);
  GroundTruth none;
  none.add_match("c0", "i4");
  EXPECT_THROW(pruning_metrics(pruned, unpruned, none, 4), DomainError);
}

std::vector<Prediction> preds(std::initializer_list<std::tuple<int, int, bool>> rows) {
  std::vector<Prediction> out;
  for (const auto& [c, i, m] : rows) {
    out.push_back({"c" + std::to_string(c), "i" + std::to_string(i), m ? 0.9 : 0.1,
                   m ? PairLabel::match : PairLabel::non_match});
  }
  return out;
}

TEST(MatchingMetrics, PerfectAndAllNegative) {
  const GroundTruth truth = diagonal(3);
  const MetricsReport perfect = matching_metrics(preds({{0, 0, true}, {0, 1, false}, {1, 1, true}, {2, 2, true}}), truth);
  EXPECT_EQ(*perfect.precision, 100.0);
  EXPECT_EQ(*perfect.recall, 100.0);
  EXPECT_EQ(*perfect.f1, 100.0);
  const MetricsReport neg = matching_metrics(preds({{0, 0, false}, {0, 1, false}}), truth);
  EXPECT_EQ(*neg.precision, 0.0);
  EXPECT_EQ(*neg.recall, 0.0);
  EXPECT_EQ(*neg.f1, 0.0);
  EXPECT_NE(std::find(neg.flags.begin(), neg.flags.end(), "precision_undefined"), neg.flags.end());
}

TEST(MatchingMetrics, HarmonicMeanIdentity) {
  std::mt19937_64 rng(2);
  const GroundTruth truth = diagonal(50);
  for (int t = 0; t < 200; ++t) {
    std::vector<Prediction> p;
    for (int c = 0; c < 50; ++c) {
      for (int i : {c, (c + 1) % 50}) {
        const bool m = rng() % 2;
        p.push_back({"c" + std::to_string(c), "i" + std::to_string(i), 0.5, m ? PairLabel::match : PairLabel::non_match});
      }
    }
    const MetricsReport r = matching_metrics(p, truth);
    EXPECT_NO_THROW(r.check());
    if (*r.precision + *r.recall > 0) {
      EXPECT_NEAR(*r.f1, 2 * *r.precision * *r.recall / (*r.precision + *r.recall), 1e-9);
    }
  }
  MetricsReport broken;
  broken.precision = 50;
  broken.recall = 50;
  broken.f1 = 70;
  EXPECT_THROW(broken.check(), InvariantError);
  broken.f1 = 50;
  broken.pc = 101;
  EXPECT_THROW(broken.check(), InvariantError);
}

TEST(GroundTruth, CleanCleanAndRestriction) {
  GroundTruth t;
  t.add_match("a", "x");
  EXPECT_THROW(t.add_match("a", "y"), SchemaError);
  EXPECT_THROW(t.add_match("b", "x"), SchemaError);
  t.add_match("b", "y");
  t.add_unmatched("z");
  EXPECT_TRUE(t.is_match("a", "x"));
  EXPECT_FALSE(t.is_match("a", "y"));
  EXPECT_EQ(*t.index_for("b"), "y");
  EXPECT_EQ(*t.candidate_for("x"), "a");
  EXPECT_EQ(t.index_for("z"), nullptr);
  const GroundTruth r = t.restricted({"a", "b"}, {"y"});
  EXPECT_EQ(r.size(), 1u);

  std::stringstream buf;
  write_truth_csv(buf, t);
  const GroundTruth back = read_truth_csv(buf);
  EXPECT_EQ(back.matches(), t.matches());
}

TEST(MetricsReport, JsonRoundTripAndTable) {
  MetricsReport r;
  r.pc = 99.5;
  r.rr = 99.799714;
  r.pc_at_k = {{1, 80.0}, {5, 99.5}};
  r.precision = 90;
  r.recall = 95;
  r.f1 = 2 * 90.0 * 95.0 / 185.0;
  r.num_pairs = 17;
  r.wall_time_s = 0.25;
  const MetricsReport back = metrics_from_json(metrics_json(r));
  EXPECT_EQ(back.pc, r.pc);
  EXPECT_EQ(back.pc_at_k, r.pc_at_k);
  EXPECT_EQ(back.f1, r.f1);
  EXPECT_EQ(back.wall_time_s, 0.25);
  EXPECT_EQ(metrics_json(r, false).find("wall_time"), std::string::npos);
  std::stringstream table;
  write_metrics_table(table, r);
  EXPECT_NE(table.str().find("99.799714"), std::string::npos);
}

TEST(Curves, CsvLayouts) {
  std::stringstream a, b;
  const std::vector<PcRrPoint> pc{{1, 80, 99.9}, {2, 90, 99.8}};
  write_pc_rr_csv(a, pc);
  EXPECT_EQ(a.str().substr(0, 8), "k,pc,rr\n");
  const std::string text = a.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  const std::vector<PruningPoint> pr{{0.95, 0.1, 0.3, 0.9}};
  write_pruning_csv(b, pr);
  EXPECT_EQ(b.str().substr(0, 27), "quantile,threshold,rr_k,pc_");
}

}  // namespace
}  // namespace meshres
