#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "meshres/bench.hpp"
#include "meshres/bkafi.hpp"
#include "meshres/eval.hpp"
#include "meshres/matcher.hpp"
#include "meshres/pair_features.hpp"
#include "meshres/properties.hpp"

namespace meshres {

struct PipelineConfig {
  PropertySchema schema = PropertySchema::full();
  RatioMode ratio_mode = RatioMode::log_ratio;
  SplitPolicy split;
  MatcherConfig blocking_model = MatcherConfig::defaults(EnsembleKind::random_forest);
  MatcherConfig matcher = MatcherConfig::defaults(EnsembleKind::bagging);
  std::size_t fb_size = 3;
  std::size_t k = 5;
  KeyCriterion criterion = KeyCriterion::feature_importance;
  std::optional<double> prune_quantile;  // unset: plain k-NN
  std::vector<std::size_t> report_ks{1, 3, 5, 10, 20};

  // Sets every stochastic seed from one value.
  void reseed(std::uint64_t seed);
  std::string to_json() const;
  static PipelineConfig from_json(std::string_view text);
};

// Property tables of both sources: normalized (blocking space) and raw.
struct FeatureTables {
  PropertyTable index;
  PropertyTable candidates;
  PropertyTable index_raw;
  PropertyTable candidates_raw;

  // Looks an id up in the candidate table first, then the index table.
  const PropertyVector& lookup(std::string_view id, bool normalized) const;
};

FeatureTables featurize_benchmark(const Benchmark& bench, const PropertySchema& schema);
// Completes raw tables with their normalized copies.
FeatureTables tables_from_raw(PropertyTable index_raw, PropertyTable candidates_raw);

// Ratio vectors for id pairs under the configured ratio mode.
std::vector<PairFeatureVector> pair_vectors(const FeatureTables& tables, std::span<const IdPair> pairs,
                                            RatioMode mode);

// Blocker backed by a k-d tree on `key`, searching normalized vectors.
Blocker kd_blocker(const FeatureTables& tables, BlockingKey key);

PropertyTable subset_table(const FeatureTables& tables, std::span<const std::string> ids, bool normalized);

struct TrainingArtifacts {
  Splits splits;
  TrainedMatcher blocking_model;
  std::vector<DiscrepancyProfile> profiles;  // per property over training matches
  std::vector<std::size_t> ranking;          // for the configured criterion
  BlockingKey key;
  TrainedMatcher matcher;
  std::vector<PairFeatureVector> blocking_train;
  std::vector<PairFeatureVector> matching_train;
  std::vector<PairFeatureVector> matching_test;
};

// Splits ids, trains the importance model on the blocking-train pairs,
// picks the key, builds hard-negative pairs with it and trains the matcher.
TrainingArtifacts train_pipeline(const Benchmark& bench, const FeatureTables& tables, const PipelineConfig& config);

struct BlockingRun {
  CandidateSet candidates;
  MetricsReport metrics;
  std::vector<double> calibration_distances;
  std::optional<double> threshold;
  std::optional<PruningMetrics> pruning;  // against the unpruned run, when pruning
};

// BKAFI over the test side of the splits: test candidates against the test
// index universe.
BlockingRun run_blocking(const Benchmark& bench, const FeatureTables& tables, const Splits& splits,
                         const BlockingKey& key, const PipelineConfig& config);

struct PipelineResult {
  TrainingArtifacts training;
  BlockingRun blocking;
  std::vector<Prediction> predictions;  // on the hard-negative test pairs
  MetricsReport matching;
  std::optional<MetricsReport> contaminated_matching;
  double seconds = 0.0;
};

PipelineResult run_pipeline(const Benchmark& bench, const PipelineConfig& config);

// Matching metrics over the predictions whose candidate is in `ids`, or
// nothing when none is.
std::optional<MetricsReport> matching_metrics_for(std::span<const Prediction> predictions, const GroundTruth& truth,
                                                  std::span<const std::string> ids);

struct TransferResult {
  double clean_f1 = 0.0;
  double transfer_f1 = 0.0;
  std::size_t within_source_pairs = 0;
};

// Trains one matcher on the clean-clean split and one on within-source
// duplicates created by dirty_clean_variant, then scores both on the same
// clean test pairs.
TransferResult run_transfer(const Benchmark& bench, double level, const PipelineConfig& config);

}  // namespace meshres
