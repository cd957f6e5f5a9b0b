#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "meshres/candidates.hpp"
#include "meshres/eval.hpp"
#include "meshres/kdtree.hpp"
#include "meshres/matcher.hpp"
#include "meshres/pair_features.hpp"
#include "meshres/properties.hpp"

namespace meshres {

enum class KeyCriterion { feature_importance, ratio_std };

std::string_view to_string(KeyCriterion c);
KeyCriterion parse_key_criterion(std::string_view text);

// Properties spanning the blocking space. Pair feature i is the ratio of
// property i, so feature ids index the property schema directly.
struct BlockingKey {
  std::vector<std::size_t> feature_ids;
  KeyCriterion criterion = KeyCriterion::feature_importance;

  std::size_t size() const noexcept { return feature_ids.size(); }
  std::vector<std::string> names(const PropertySchema& schema) const;
};

// Full feature ranking: by importance (descending) or by the standard
// deviation of match ratios (ascending); ties in schema order.
std::vector<std::size_t> rank_features(const TrainedMatcher& model);
std::vector<std::size_t> rank_features(std::span<const DiscrepancyProfile> profiles, const PropertySchema& schema);

// The first `size` ids of a ranking. Throws DomainError unless
// 1 <= size <= ranking length.
BlockingKey key_from_ranking(std::span<const std::size_t> ranking, std::size_t size, KeyCriterion criterion);
BlockingKey select_blocking_key(const TrainedMatcher& model, std::size_t size);
BlockingKey select_blocking_key(std::span<const DiscrepancyProfile> profiles, const PropertySchema& schema,
                                std::size_t size);

// Sub-vector of `v` on the key's features.
std::vector<double> project(const PropertyVector& v, const BlockingKey& key);

class BlockingIndex {
 public:
  // Throws DomainError for an empty index set, SchemaError for
  // unnormalized vectors or key ids outside the schema.
  BlockingIndex(const PropertyTable& index_set, BlockingKey key);

  const BlockingKey& key() const noexcept { return key_; }
  const PropertySchema& schema() const noexcept { return schema_; }
  std::size_t size() const noexcept { return tree_.size(); }
  const KdTree& tree() const noexcept { return tree_; }
  double build_seconds() const noexcept { return build_seconds_; }

  std::optional<double> prune_threshold() const noexcept { return prune_threshold_; }
  void set_prune_threshold(std::optional<double> threshold) { prune_threshold_ = threshold; }

 private:
  PropertySchema schema_;
  BlockingKey key_;
  KdTree tree_;
  std::optional<double> prune_threshold_;
  double build_seconds_ = 0.0;
};

// Distances in key space between the given matching pairs.
std::vector<double> match_distances(const PropertyTable& candidates, const PropertyTable& index_set,
                                    std::span<const IdPair> matches, const BlockingKey& key);

// Linear-interpolated quantile; q = 0 gives the minimum. Throws
// DomainError for an empty sample or q outside [0, 1].
double calibrate_threshold(std::span<const double> distances, double quantile);

// k nearest index ids per candidate (candidates in table order). With
// `prune` set and the index carrying a threshold, each list stops at the
// first neighbour beyond it. k above |D^I| is clamped and reported in
// `warnings`.
CandidateSet generate_candidates(const PropertyTable& candidates, const BlockingIndex& index, std::size_t k,
                                 bool prune = false, std::vector<std::string>* warnings = nullptr);

struct SweepPoint {
  std::size_t fb = 0;
  std::size_t k = 0;
  double pc = 0.0;
  double rr = 0.0;
  double build_seconds = 0.0;
  double query_seconds = 0.0;
};

// Grid over key sizes and k for one ranking; PC is measured against
// `truth` restricted to the given tables.
std::vector<SweepPoint> sweep(const PropertyTable& candidates, const PropertyTable& index_set,
                              std::span<const std::size_t> ranking, KeyCriterion criterion,
                              std::span<const std::size_t> k_list, std::span<const std::size_t> fb_list,
                              const GroundTruth& truth);

// Timing columns are optional so that the file can be compared byte for
// byte across runs.
void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points, bool include_timing = true);

}  // namespace meshres
