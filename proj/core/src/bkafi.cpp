#include "meshres/bkafi.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>

#include "meshres/csv.hpp"
#include "meshres/error.hpp"
#include "meshres/parallel.hpp"

namespace meshres {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::string_view to_string(KeyCriterion c) {
  return c == KeyCriterion::feature_importance ? "importance" : "std";
}

KeyCriterion parse_key_criterion(std::string_view text) {
  if (text == "importance" || text == "feature_importance") return KeyCriterion::feature_importance;
  if (text == "std" || text == "ratio_std") return KeyCriterion::ratio_std;
  throw SchemaError("unknown key criterion '" + std::string(text) + "'");
}

std::vector<std::string> BlockingKey::names(const PropertySchema& schema) const {
  std::vector<std::string> out;
  for (std::size_t id : feature_ids) out.emplace_back(schema.name(id));
  return out;
}

std::vector<std::size_t> rank_features(const TrainedMatcher& model) {
  const auto imp = model.importance();
  std::vector<std::size_t> order(imp.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return imp[a] > imp[b]; });
  return order;
}

std::vector<std::size_t> rank_features(std::span<const DiscrepancyProfile> profiles, const PropertySchema& schema) {
  std::vector<double> sigma(schema.size(), std::numeric_limits<double>::infinity());
  for (const DiscrepancyProfile& p : profiles) sigma[schema.require_index(p.property_name)] = p.sigma;
  std::vector<std::size_t> order(schema.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sigma[a] < sigma[b]; });
  return order;
}

BlockingKey key_from_ranking(std::span<const std::size_t> ranking, std::size_t size, KeyCriterion criterion) {
  if (size < 1 || size > ranking.size()) {
    throw DomainError("blocking key size " + std::to_string(size) + " outside [1, " +
                      std::to_string(ranking.size()) + "]");
  }
  BlockingKey key;
  key.criterion = criterion;
  key.feature_ids.assign(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(size));
  return key;
}

BlockingKey select_blocking_key(const TrainedMatcher& model, std::size_t size) {
  return key_from_ranking(rank_features(model), size, KeyCriterion::feature_importance);
}

BlockingKey select_blocking_key(std::span<const DiscrepancyProfile> profiles, const PropertySchema& schema,
                                std::size_t size) {
  return key_from_ranking(rank_features(profiles, schema), size, KeyCriterion::ratio_std);
}

std::vector<double> project(const PropertyVector& v, const BlockingKey& key) {
  std::vector<double> out;
  out.reserve(key.size());
  for (std::size_t id : key.feature_ids) out.push_back(v.values.at(id));
  return out;
}

BlockingIndex::BlockingIndex(const PropertyTable& index_set, BlockingKey key)
    : schema_(index_set.schema()), key_(std::move(key)) {
  const auto start = Clock::now();
  if (index_set.empty()) throw DomainError("cannot build a blocking index over an empty index set");
  if (!index_set.normalized()) throw SchemaError("blocking index needs log1p-normalized property vectors");
  if (key_.feature_ids.empty()) throw DomainError("blocking key is empty");
  std::set<std::size_t> seen;
  for (std::size_t id : key_.feature_ids) {
    if (id >= schema_.size()) throw SchemaError("blocking key feature " + std::to_string(id) + " outside schema");
    if (!seen.insert(id).second) throw SchemaError("blocking key repeats feature " + std::to_string(id));
  }
  std::vector<double> coords;
  std::vector<std::string> ids;
  coords.reserve(index_set.size() * key_.size());
  for (const PropertyVector& row : index_set.rows()) {
    for (std::size_t id : key_.feature_ids) coords.push_back(row.values[id]);
    ids.push_back(row.mesh_id);
  }
  tree_ = KdTree(key_.size(), std::move(coords), std::move(ids));
  build_seconds_ = seconds_since(start);
}

std::vector<double> match_distances(const PropertyTable& candidates, const PropertyTable& index_set,
                                    std::span<const IdPair> matches, const BlockingKey& key) {
  std::vector<double> out;
  out.reserve(matches.size());
  for (const IdPair& m : matches) {
    const PropertyVector& c = candidates.at(m.candidate_id);
    const PropertyVector& i = index_set.at(m.index_id);
    double s = 0.0;
    for (std::size_t id : key.feature_ids) {
      const double d = c.values.at(id) - i.values.at(id);
      s += d * d;
    }
    out.push_back(std::sqrt(s));
  }
  return out;
}

double calibrate_threshold(std::span<const double> distances, double quantile) {
  if (distances.empty()) throw DomainError("threshold calibration needs at least one match distance");
  if (!(quantile >= 0.0 && quantile <= 1.0)) throw DomainError("prune quantile must lie in [0, 1]");
  std::vector<double> sorted(distances.begin(), distances.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = quantile * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

CandidateSet generate_candidates(const PropertyTable& candidates, const BlockingIndex& index, std::size_t k,
                                 bool prune, std::vector<std::string>* warnings) {
  if (k < 1) throw DomainError("k must be at least 1");
  if (!(candidates.schema() == index.schema())) {
    throw SchemaError("candidate property schema differs from the blocking index schema");
  }
  if (!candidates.normalized()) throw SchemaError("candidate vectors must be log1p-normalized");
  if (k > index.size()) {
    if (warnings != nullptr) {
      warnings->push_back("k=" + std::to_string(k) + " exceeds the index size; clamped to " +
                          std::to_string(index.size()));
    }
    k = index.size();
  }
  const double limit = prune && index.prune_threshold() ? *index.prune_threshold()
                                                        : std::numeric_limits<double>::infinity();

  const auto start = Clock::now();
  const auto rows = candidates.rows();
  std::vector<std::vector<Neighbor>> found(rows.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    found[i] = index.tree().knn(project(rows[i], index.key()), k, limit);
  });
  CandidateSet set;
  set.query_seconds = seconds_since(start);
  set.k = k;
  set.pruned = prune && index.prune_threshold().has_value();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::size_t rank = 1;
    for (const Neighbor& n : found[i]) {
      set.pairs.push_back({rows[i].mesh_id, index.tree().id(n.point), n.distance, rank++});
    }
  }
  return set;
}

std::vector<SweepPoint> sweep(const PropertyTable& candidates, const PropertyTable& index_set,
                              std::span<const std::size_t> ranking, KeyCriterion criterion,
                              std::span<const std::size_t> k_list, std::span<const std::size_t> fb_list,
                              const GroundTruth& truth) {
  std::set<std::string> cand_ids, index_ids;
  for (const PropertyVector& v : candidates.rows()) cand_ids.insert(v.mesh_id);
  for (const PropertyVector& v : index_set.rows()) index_ids.insert(v.mesh_id);
  const GroundTruth scoped = truth.restricted(cand_ids, index_ids);

  std::vector<SweepPoint> points;
  for (std::size_t fb : fb_list) {
    const BlockingIndex index(index_set, key_from_ranking(ranking, fb, criterion));
    for (std::size_t k : k_list) {
      const CandidateSet set = generate_candidates(candidates, index, k);
      SweepPoint p;
      p.fb = fb;
      p.k = set.k;
      p.pc = pair_completeness(set, scoped);
      p.rr = reduction_ratio(set.size(), candidates.size(), index_set.size());
      p.build_seconds = index.build_seconds();
      p.query_seconds = set.query_seconds;
      points.push_back(p);
    }
  }
  return points;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points, bool include_timing) {
  out << "fb,k,pc,rr" << (include_timing ? ",build_seconds,query_seconds" : "") << '\n';
  for (const SweepPoint& p : points) {
    out << p.fb << ',' << p.k << ',' << csv::format_fixed(p.pc, 6) << ',' << csv::format_fixed(p.rr, 6);
    if (include_timing) {
      out << ',' << csv::format_fixed(p.build_seconds, 6) << ',' << csv::format_fixed(p.query_seconds, 6);
    }
    out << '\n';
  }
}

}  // namespace meshres
