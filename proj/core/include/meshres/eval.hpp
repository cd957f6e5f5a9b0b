#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "meshres/candidates.hpp"
#include "meshres/matcher.hpp"

namespace meshres {

// True (candidate, index) matches of a clean-clean task: every id takes
// part in at most one match.
class GroundTruth {
 public:
  // Throws SchemaError if either id already has a match.
  void add_match(const std::string& candidate_id, const std::string& index_id);
  void add_unmatched(const std::string& candidate_id);

  std::size_t size() const noexcept { return matches_.size(); }
  const std::vector<std::pair<std::string, std::string>>& matches() const noexcept { return matches_; }
  const std::set<std::string>& candidates_without_match() const noexcept { return unmatched_; }

  const std::string* index_for(std::string_view candidate_id) const;
  const std::string* candidate_for(std::string_view index_id) const;
  bool is_match(std::string_view candidate_id, std::string_view index_id) const;

  // Matches whose two ids both satisfy the filters.
  GroundTruth restricted(const std::set<std::string>& candidate_ids, const std::set<std::string>& index_ids) const;

 private:
  std::vector<std::pair<std::string, std::string>> matches_;
  std::set<std::string> unmatched_;
  std::unordered_map<std::string, std::string> by_candidate_;
  std::unordered_map<std::string, std::string> by_index_;
};

// truth.csv: candidate_id,index_id.
void write_truth_csv(std::ostream& out, const GroundTruth& truth);
GroundTruth read_truth_csv(std::istream& in);

struct MetricsReport {
  std::optional<double> pc;  // percentages throughout
  std::optional<double> rr;
  std::map<std::size_t, double> pc_at_k;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  std::vector<std::string> flags;  // e.g. "precision_undefined"
  std::size_t num_pairs = 0;
  double wall_time_s = 0.0;   // query or prediction loop only
  double build_time_s = 0.0;  // index construction, reported apart

  // Throws InvariantError if a metric leaves [0, 100] or F1 is not the
  // harmonic mean of precision and recall.
  void check() const;
};

// 100 * (1 - pairs / (nc * ni)).
double reduction_ratio(std::size_t pairs, std::size_t num_candidates, std::size_t num_index);
// 100 * |C n matches| / |matches|; throws DomainError without matches.
double pair_completeness(const CandidateSet& set, const GroundTruth& truth);

// PC, RR and PC@k for each k in `ks` (ranks truncated at k).
MetricsReport blocking_metrics(const CandidateSet& set, const GroundTruth& truth, std::size_t num_candidates,
                               std::size_t num_index, std::span<const std::size_t> ks = {});

struct PruningMetrics {
  double rr_k = 0.0;  // fractions, not percentages
  double pc_k = 0.0;
};

// RR_k = 1 - |pruned| / (k * nc); PC_k = PC(pruned) / PC(unpruned).
// Throws DomainError when the unpruned set finds no match.
PruningMetrics pruning_metrics(const CandidateSet& pruned, const CandidateSet& unpruned, const GroundTruth& truth,
                               std::size_t num_candidates);

// Binary P/R/F1 over the predicted pairs; undefined ratios are 0 and
// flagged.
MetricsReport matching_metrics(std::span<const Prediction> predictions, const GroundTruth& truth);

// Timings can be left out to keep the document reproducible byte for byte.
std::string metrics_json(const MetricsReport& report, bool include_timing = true);
MetricsReport metrics_from_json(std::string_view text);
void write_metrics_table(std::ostream& out, const MetricsReport& report);

struct PcRrPoint {
  std::size_t k = 0;
  double pc = 0.0;
  double rr = 0.0;
};
struct PruningPoint {
  double quantile = 0.0;
  double threshold = 0.0;
  double rr_k = 0.0;
  double pc_k = 0.0;
};
void write_pc_rr_csv(std::ostream& out, std::span<const PcRrPoint> points);
void write_pruning_csv(std::ostream& out, std::span<const PruningPoint> points);

}  // namespace meshres
