#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "meshres/decision_tree.hpp"
#include "meshres/pair_features.hpp"
#include "meshres/properties.hpp"

namespace meshres {

enum class EnsembleKind { bagging, random_forest, gradient_boosting };

std::string_view to_string(EnsembleKind kind);
EnsembleKind parse_ensemble_kind(std::string_view text);

struct MatcherConfig {
  EnsembleKind kind = EnsembleKind::bagging;
  std::size_t n_trees = 100;
  std::size_t max_depth = 8;
  double min_leaf_weight = 1.0;
  double learning_rate = 0.1;  // boosting only
  double decision_threshold = 0.5;
  std::uint64_t seed = 42;

  // Boosting gets shallow trees; the bagged ensembles get the deep default.
  static MatcherConfig defaults(EnsembleKind kind);
};

class TrainedMatcher {
 public:
  TrainedMatcher() = default;

  EnsembleKind kind() const noexcept { return config_.kind; }
  const MatcherConfig& config() const noexcept { return config_; }
  const PropertySchema& schema() const noexcept { return schema_; }
  std::span<const DecisionTree> trees() const noexcept { return trees_; }
  std::span<const double> importance() const noexcept { return importance_; }
  double base_score() const noexcept { return base_score_; }

  // Match probability of one feature vector (schema order).
  double probability(std::span<const double> features) const;

  std::string to_json() const;
  static TrainedMatcher from_json(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static TrainedMatcher load(const std::filesystem::path& path);

  // Throws InvariantError if trees, importance or threshold are malformed.
  void check() const;

 private:
  friend TrainedMatcher train_matcher(std::span<const PairFeatureVector>, const PropertySchema&,
                                      const MatcherConfig&);

  MatcherConfig config_;
  PropertySchema schema_;
  std::vector<DecisionTree> trees_;
  std::vector<double> importance_;
  double base_score_ = 0.0;
};

// Trains on labeled pairs (unlabeled ones are an error). Deterministic for a
// given seed regardless of the worker count. Throws Error for a
// single-class training set or non-finite features, SchemaError when a
// vector does not match the schema length.
TrainedMatcher train_matcher(std::span<const PairFeatureVector> pairs, const PropertySchema& schema,
                             const MatcherConfig& config);

struct Prediction {
  std::string candidate_id;
  std::string index_id;
  double probability = 0.0;
  PairLabel label = PairLabel::non_match;
};

// Throws SchemaError when `schema` differs from the model's snapshot.
std::vector<Prediction> predict(const TrainedMatcher& model, std::span<const PairFeatureVector> pairs,
                                const PropertySchema& schema);

// Descending by score, ties in schema order.
std::vector<std::pair<std::string, double>> feature_importance(const TrainedMatcher& model);

// Mean held-out accuracy over `folds` shuffled folds.
double cross_validated_accuracy(std::span<const PairFeatureVector> pairs, const PropertySchema& schema,
                                const MatcherConfig& config, std::size_t folds = 5);

struct GridPoint {
  std::size_t max_depth = 0;
  std::size_t n_trees = 0;
  double accuracy = 0.0;
};

// Cross-validates max_depth in {4, 8, 12} x n_trees in {50, 100} and
// returns `base` with the best pair (first wins on ties); `trace`, when
// given, receives every grid point.
MatcherConfig grid_search(std::span<const PairFeatureVector> pairs, const PropertySchema& schema,
                          const MatcherConfig& base, std::size_t folds = 5,
                          std::vector<GridPoint>* trace = nullptr);

}  // namespace meshres
