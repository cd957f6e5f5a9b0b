#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "meshres/candidates.hpp"
#include "meshres/eval.hpp"
#include "meshres/mesh.hpp"
#include "meshres/pair_features.hpp"

namespace meshres {

// Multiplicative discrepancy of one family of extents: the candidate's
// extent is the index extent times r_g * (1 + N(0, sigma)).
struct Discrepancy {
  double r_g = 1.0;
  double sigma = 0.0;
};

// containment keeps the index twins of the entities whose candidate was
// replaced by an unmatched one, so every matched candidate's twin and some
// orphans share D^I; disjoint drops those twins.
enum class IndexMode { containment, disjoint };

std::string_view to_string(IndexMode mode);
IndexMode parse_index_mode(std::string_view text);

struct GeneratorConfig {
  std::size_t n_entities = 1000;  // candidates generated, matched or not
  std::uint64_t seed = 42;
  Discrepancy footprint{1.0, 0.02};  // per-vertex radial scale of the footprint
  Discrepancy height{1.0, 0.05};     // per-entity scale of the extrusion height
  std::size_t footprint_complexity = 12;
  // Up to this many outline edges of a matched candidate are split in two,
  // as a different source would tessellate the same building.
  std::size_t extra_vertices = 6;
  double unmatched_fraction = 0.2;
  bool rigid_transform = true;  // candidates get their own yaw and translation
  IndexMode index_mode = IndexMode::containment;
  std::size_t extra_index = 0;  // distractor index objects without candidates

  // Throws DomainError when a field is out of range.
  void validate() const;
  std::string to_json() const;
  static GeneratorConfig from_json(std::string_view text);
};

struct Benchmark {
  GeneratorConfig config;
  MeshDataset index{SourceTag::index};
  MeshDataset candidates{SourceTag::candidate};
  GroundTruth truth;
  std::vector<std::string> contaminated;  // candidate ids touched by contamination
};

Benchmark generate_benchmark(const GeneratorConfig& config);

// Bundle directory: index.jsonl, candidates.jsonl, truth.csv,
// manifest.json and, after contamination, contaminated.csv. The manifest
// is the only file carrying a timestamp.
void write_bundle(const std::filesystem::path& dir, const Benchmark& bench, std::string_view extra_manifest_json = "{}");
Benchmark read_bundle(const std::filesystem::path& dir);

struct SplitPolicy {
  double train_ratio = 0.6;
  std::size_t negatives_per_positive = 2;
  std::size_t hard_negative_k = 3;
  std::uint64_t seed = 42;

  void validate() const;
};

struct Splits {
  std::vector<std::string> train_candidates;  // matched only
  std::vector<std::string> test_candidates;   // matched and unmatched
  std::vector<std::string> train_index;       // index universe seen in training
  std::vector<std::string> test_index;        // D^I without training twins
  std::vector<IdPair> blocking_train;         // positives plus random negatives
  std::vector<IdPair> matching_train;         // hard negatives plus the true match
  std::vector<IdPair> matching_test;
};

std::string splits_to_json(const Splits& splits);
Splits splits_from_json(std::string_view text);

// Id-level split: matched candidates are shuffled and the first
// round(train_ratio * |M|) go to training; a proportional share of the
// unmatched candidates joins the test side. Blocking-train negatives are
// drawn uniformly from the training index universe. Throws Error when
// either side would be empty.
Splits split_ids(const Benchmark& bench, const SplitPolicy& policy);

// Returns, per candidate id, up to k index ids nearest first, searching
// only among `index_ids`.
using Blocker = std::function<std::vector<std::vector<std::string>>(
    const std::vector<std::string>& candidate_ids, const std::vector<std::string>& index_ids, std::size_t k)>;

// split_ids plus hard-negative matching pairs: the blocker's top
// hard_negative_k neighbours with the true match always included.
Splits build_splits(const Benchmark& bench, const SplitPolicy& policy, const Blocker& blocker);

// Exchanges the candidate and index geometry of ceil(level * |M|) matched
// entities. Ids and truth stay as they are; the touched candidate ids are
// recorded in `contaminated`. Throws DomainError for level outside [0, 0.5].
Benchmark contaminate_swap(const Benchmark& bench, double level, std::uint64_t seed);

struct DirtyCleanVariant {
  Benchmark bench;  // index twins of the moved entities now live in D^C
  std::vector<IdPair> within_source;  // (candidate id, moved twin id) duplicates
};

// Moves the index twin of ceil(level * |M|) matched entities into D^C;
// truth keeps only the cross-source matches that remain.
DirtyCleanVariant dirty_clean_variant(const Benchmark& bench, double level, std::uint64_t seed);

}  // namespace meshres
