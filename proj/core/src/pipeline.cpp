#include "meshres/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <unordered_set>

#include "json.hpp"
#include "meshres/error.hpp"
#include "meshres/random.hpp"

namespace meshres {

namespace {

using Clock = std::chrono::steady_clock;

PropertyTable normalized_copy(const PropertyTable& raw) {
  PropertyTable out(raw.schema(), true);
  for (const PropertyVector& row : raw.rows()) out.add(normalize_log1p(row));
  return out;
}

nlohmann::ordered_json matcher_json(const MatcherConfig& c) {
  return {{"kind", std::string(to_string(c.kind))},
          {"n_trees", c.n_trees},
          {"max_depth", c.max_depth},
          {"min_leaf_weight", c.min_leaf_weight},
          {"learning_rate", c.learning_rate},
          {"decision_threshold", c.decision_threshold},
          {"seed", c.seed}};
}

MatcherConfig matcher_from(const nlohmann::json& j) {
  MatcherConfig c = MatcherConfig::defaults(parse_ensemble_kind(j.at("kind").get<std::string>()));
  c.n_trees = j.value("n_trees", c.n_trees);
  c.max_depth = j.value("max_depth", c.max_depth);
  c.min_leaf_weight = j.value("min_leaf_weight", c.min_leaf_weight);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.decision_threshold = j.value("decision_threshold", c.decision_threshold);
  c.seed = j.value("seed", c.seed);
  return c;
}

std::vector<PairFeatureVector> labelled(const FeatureTables& tables, std::span<const IdPair> pairs, RatioMode mode) {
  return pair_vectors(tables, pairs, mode);
}

}  // namespace

void PipelineConfig::reseed(std::uint64_t seed) {
  split.seed = seed;
  blocking_model.seed = derive_seed(seed, 101);
  matcher.seed = derive_seed(seed, 102);
}

std::string PipelineConfig::to_json() const {
  nlohmann::ordered_json j;
  j["schema"] = schema.names();
  j["ratio_mode"] = std::string(to_string(ratio_mode));
  j["split"] = {{"train_ratio", split.train_ratio},
                {"negatives_per_positive", split.negatives_per_positive},
                {"hard_negative_k", split.hard_negative_k},
                {"seed", split.seed}};
  j["blocking_model"] = matcher_json(blocking_model);
  j["matcher"] = matcher_json(matcher);
  j["blocking"] = {{"fb_size", fb_size},
                   {"k", k},
                   {"criterion", std::string(to_string(criterion))},
                   {"prune_quantile", prune_quantile ? nlohmann::ordered_json(*prune_quantile) : nlohmann::ordered_json()}};
  j["report_ks"] = report_ks;
  return j.dump(2);
}

PipelineConfig PipelineConfig::from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    PipelineConfig c;
    c.schema = PropertySchema::from_names(j.at("schema").get<std::vector<std::string>>());
    c.ratio_mode = parse_ratio_mode(j.at("ratio_mode").get<std::string>());
    const auto& s = j.at("split");
    c.split.train_ratio = s.at("train_ratio").get<double>();
    c.split.negatives_per_positive = s.at("negatives_per_positive").get<std::size_t>();
    c.split.hard_negative_k = s.at("hard_negative_k").get<std::size_t>();
    c.split.seed = s.at("seed").get<std::uint64_t>();
    c.blocking_model = matcher_from(j.at("blocking_model"));
    c.matcher = matcher_from(j.at("matcher"));
    const auto& b = j.at("blocking");
    c.fb_size = b.at("fb_size").get<std::size_t>();
    c.k = b.at("k").get<std::size_t>();
    c.criterion = parse_key_criterion(b.at("criterion").get<std::string>());
    if (!b.at("prune_quantile").is_null()) c.prune_quantile = b.at("prune_quantile").get<double>();
    c.report_ks = j.at("report_ks").get<std::vector<std::size_t>>();
    return c;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("pipeline config is not valid JSON: ") + e.what(), e.byte);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed pipeline config: ") + e.what());
  }
}

const PropertyVector& FeatureTables::lookup(std::string_view id, bool normalized) const {
  const PropertyTable& c = normalized ? candidates : candidates_raw;
  const PropertyTable& i = normalized ? index : index_raw;
  if (const PropertyVector* v = c.find(id)) return *v;
  return i.at(id);
}

FeatureTables featurize_benchmark(const Benchmark& bench, const PropertySchema& schema) {
  return tables_from_raw(featurize(bench.index, schema, false), featurize(bench.candidates, schema, false));
}

FeatureTables tables_from_raw(PropertyTable index_raw, PropertyTable candidates_raw) {
  if (!(index_raw.schema() == candidates_raw.schema())) throw SchemaError("property tables use different schemas");
  FeatureTables t;
  t.index_raw = std::move(index_raw);
  t.candidates_raw = std::move(candidates_raw);
  t.index = normalized_copy(t.index_raw);
  t.candidates = normalized_copy(t.candidates_raw);
  return t;
}

std::vector<PairFeatureVector> pair_vectors(const FeatureTables& tables, std::span<const IdPair> pairs,
                                            RatioMode mode) {
  const bool normalized = mode == RatioMode::log_ratio;
  std::vector<PairFeatureVector> out;
  out.reserve(pairs.size());
  for (const IdPair& p : pairs) {
    out.push_back(pair_features(tables.lookup(p.candidate_id, normalized), tables.lookup(p.index_id, normalized), mode));
    out.back().label = p.label;
  }
  return out;
}

PropertyTable subset_table(const FeatureTables& tables, std::span<const std::string> ids, bool normalized) {
  PropertyTable out(tables.index.schema(), normalized);
  for (const std::string& id : ids) out.add(tables.lookup(id, normalized));
  return out;
}

Blocker kd_blocker(const FeatureTables& tables, BlockingKey key) {
  return [&tables, key = std::move(key)](const std::vector<std::string>& candidate_ids,
                                         const std::vector<std::string>& index_ids, std::size_t k) {
    const BlockingIndex index(subset_table(tables, index_ids, true), key);
    const CandidateSet set = generate_candidates(subset_table(tables, candidate_ids, true), index, k);
    std::vector<std::vector<std::string>> lists(candidate_ids.size());
    std::size_t row = 0;
    for (std::size_t i = 0; i < set.pairs.size(); ++i) {
      while (set.pairs[i].candidate_id != candidate_ids[row]) ++row;
      lists[row].push_back(set.pairs[i].index_id);
    }
    return lists;
  };
}

TrainingArtifacts train_pipeline(const Benchmark& bench, const FeatureTables& tables, const PipelineConfig& config) {
  TrainingArtifacts a;
  const Splits ids = split_ids(bench, config.split);
  a.blocking_train = labelled(tables, ids.blocking_train, config.ratio_mode);
  a.blocking_model = train_matcher(a.blocking_train, config.schema, config.blocking_model);
  for (std::size_t i = 0; i < config.schema.size(); ++i) {
    a.profiles.push_back(estimate_discrepancy(a.blocking_train, config.schema, config.schema.name(i)));
  }
  a.ranking = config.criterion == KeyCriterion::feature_importance ? rank_features(a.blocking_model)
                                                                   : rank_features(a.profiles, config.schema);
  a.key = key_from_ranking(a.ranking, config.fb_size, config.criterion);

  a.splits = build_splits(bench, config.split, kd_blocker(tables, a.key));
  a.matching_train = labelled(tables, a.splits.matching_train, config.ratio_mode);
  a.matching_test = labelled(tables, a.splits.matching_test, config.ratio_mode);
  a.matcher = train_matcher(a.matching_train, config.schema, config.matcher);
  return a;
}

BlockingRun run_blocking(const Benchmark& bench, const FeatureTables& tables, const Splits& splits,
                         const BlockingKey& key, const PipelineConfig& config) {
  const PropertyTable cands = subset_table(tables, splits.test_candidates, true);
  const PropertyTable index_set = subset_table(tables, splits.test_index, true);
  BlockingIndex index(index_set, key);

  std::set<std::string> cand_ids(splits.test_candidates.begin(), splits.test_candidates.end());
  std::set<std::string> index_ids(splits.test_index.begin(), splits.test_index.end());
  const GroundTruth truth = bench.truth.restricted(cand_ids, index_ids);

  BlockingRun run;
  std::vector<IdPair> train_matches;
  for (const std::string& c : splits.train_candidates) {
    if (const std::string* twin = bench.truth.index_for(c)) train_matches.push_back({c, *twin, PairLabel::match});
  }
  run.calibration_distances = match_distances(tables.candidates, tables.index, train_matches, key);

  const CandidateSet unpruned = generate_candidates(cands, index, config.k);
  if (config.prune_quantile) {
    run.threshold = calibrate_threshold(run.calibration_distances, *config.prune_quantile);
    index.set_prune_threshold(run.threshold);
    run.candidates = generate_candidates(cands, index, config.k, true);
    run.pruning = pruning_metrics(run.candidates, unpruned, truth, cands.size());
  } else {
    run.candidates = unpruned;
  }
  std::vector<std::size_t> ks;
  for (std::size_t k : config.report_ks) {
    if (k <= run.candidates.k) ks.push_back(k);
  }
  run.metrics = blocking_metrics(run.candidates, truth, cands.size(), index_set.size(), ks);
  run.metrics.build_time_s = index.build_seconds();
  return run;
}

std::optional<MetricsReport> matching_metrics_for(std::span<const Prediction> predictions, const GroundTruth& truth,
                                                  std::span<const std::string> ids) {
  const std::unordered_set<std::string> wanted(ids.begin(), ids.end());
  std::vector<Prediction> subset;
  for (const Prediction& p : predictions) {
    if (wanted.contains(p.candidate_id)) subset.push_back(p);
  }
  if (subset.empty()) return std::nullopt;
  return matching_metrics(subset, truth);
}

PipelineResult run_pipeline(const Benchmark& bench, const PipelineConfig& config) {
  const auto start = Clock::now();
  const FeatureTables tables = featurize_benchmark(bench, config.schema);
  PipelineResult r;
  r.training = train_pipeline(bench, tables, config);
  r.blocking = run_blocking(bench, tables, r.training.splits, r.training.key, config);

  const auto t0 = Clock::now();
  r.predictions = predict(r.training.matcher, r.training.matching_test, config.schema);
  r.matching = matching_metrics(r.predictions, bench.truth);
  r.matching.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
  r.contaminated_matching = matching_metrics_for(r.predictions, bench.truth, bench.contaminated);
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

TransferResult run_transfer(const Benchmark& bench, double level, const PipelineConfig& config) {
  const FeatureTables clean_tables = featurize_benchmark(bench, config.schema);
  const TrainingArtifacts clean = train_pipeline(bench, clean_tables, config);
  TransferResult result;
  result.clean_f1 = *matching_metrics(predict(clean.matcher, clean.matching_test, config.schema), bench.truth).f1;

  const DirtyCleanVariant dirty = dirty_clean_variant(bench, level, config.split.seed);
  const std::set<std::string> held_out(clean.splits.test_candidates.begin(), clean.splits.test_candidates.end());
  std::vector<std::string> positives_c, pool;
  std::vector<IdPair> pairs;
  for (const IdPair& p : dirty.within_source) {
    if (!held_out.contains(p.candidate_id)) positives_c.push_back(p.candidate_id);
  }
  if (positives_c.empty()) throw Error("no within-source duplicates outside the test split");
  for (const PolygonMesh& m : dirty.bench.candidates.meshes()) {
    if (!held_out.contains(m.mesh_id)) pool.push_back(m.mesh_id);
  }

  // Both members of a within-source pair now live in D^C; their features
  // are unchanged, so the clean tables still answer every lookup.
  const auto neighbours =
      kd_blocker(clean_tables, clean.key)(positives_c, pool, config.split.hard_negative_k + 2);
  std::unordered_map<std::string, std::string> twin_of;
  for (const IdPair& p : dirty.within_source) twin_of[p.candidate_id] = p.index_id;
  for (std::size_t i = 0; i < positives_c.size(); ++i) {
    const std::string& c = positives_c[i];
    const std::string& twin = twin_of.at(c);
    pairs.push_back({c, twin, PairLabel::match});
    std::size_t taken = 0;
    for (const std::string& n : neighbours[i]) {
      if (n == c || n == twin || taken == config.split.hard_negative_k) continue;
      pairs.push_back({c, n, PairLabel::non_match});
      ++taken;
    }
  }
  result.within_source_pairs = pairs.size();
  const TrainedMatcher transfer = train_matcher(pair_vectors(clean_tables, pairs, config.ratio_mode), config.schema,
                                                config.matcher);
  result.transfer_f1 = *matching_metrics(predict(transfer, clean.matching_test, config.schema), bench.truth).f1;
  return result;
}

}  // namespace meshres
