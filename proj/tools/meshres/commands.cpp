#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include "meshres/bkafi.hpp"
#include "meshres/cityjson.hpp"
#include "meshres/csv.hpp"
#include "meshres/error.hpp"
#include "meshres/mesh_io.hpp"
#include "meshres/parallel.hpp"
#include "meshres/pipeline.hpp"
#include "run_files.hpp"

namespace meshres::cli {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

PropertySchema schema_from(const std::vector<std::string>& names) {
  return names.empty() ? PropertySchema::full() : PropertySchema::from_names(names);
}

Json metrics_doc(const MetricsReport& r) { return Json::parse(metrics_json(r, false)); }

Json timing_doc(const MetricsReport& r) { return {{"wall_time_s", r.wall_time_s}, {"build_time_s", r.build_time_s}}; }

// Everything a run directory holds after `train`.
struct RunState {
  fs::path dir;
  PipelineConfig config;
  FeatureTables tables;
  Splits splits;
  Benchmark bench;  // truth and contamination record only
};

PropertyTable read_table(const fs::path& path) {
  std::istringstream in(read_text(path));
  return read_property_csv(in, false);
}

RunState load_run(const fs::path& dir) {
  require_dir(dir, "run");
  RunState s;
  s.dir = dir;
  s.config = PipelineConfig::from_json(read_text(require_file(dir, "config.json")));
  s.tables = tables_from_raw(read_table(require_file(dir, "index_properties.csv")),
                             read_table(require_file(dir, "candidate_properties.csv")));
  if (!(s.tables.index.schema() == s.config.schema)) throw SchemaError("stored property tables do not match config.json");
  s.splits = splits_from_json(read_text(require_file(dir, "splits.json")));
  std::istringstream truth(read_text(require_file(dir, "truth.csv")));
  s.bench.truth = read_truth_csv(truth);
  if (fs::exists(dir / "contaminated.csv")) {
    std::istringstream in(read_text(dir / "contaminated.csv"));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (!line.empty()) s.bench.contaminated.push_back(line);
    }
  }
  return s;
}

std::vector<std::size_t> ranking_for(const RunState& s, KeyCriterion criterion) {
  if (criterion == KeyCriterion::feature_importance) {
    return rank_features(TrainedMatcher::load(require_file(s.dir, "blocking_model.json")));
  }
  const auto pairs = pair_vectors(s.tables, s.splits.blocking_train, s.config.ratio_mode);
  std::vector<DiscrepancyProfile> profiles;
  for (std::size_t i = 0; i < s.config.schema.size(); ++i) {
    profiles.push_back(estimate_discrepancy(pairs, s.config.schema, s.config.schema.name(i)));
  }
  return rank_features(profiles, s.config.schema);
}

void write_pairs_file(const fs::path& path, const PropertySchema& schema, const std::vector<PairFeatureVector>& pairs) {
  write_with(path, [&](std::ostream& out) { write_pair_csv(out, schema, pairs); });
}

std::vector<PairFeatureVector> read_pairs_file(const fs::path& path, PropertySchema& schema) {
  std::istringstream in(read_text(path));
  return read_pair_csv(in, &schema);
}

void write_predictions(const fs::path& path, const std::vector<Prediction>& preds) {
  write_with(path, [&](std::ostream& out) {
    out << "candidate_id,index_id,probability,label\n";
    for (const Prediction& p : preds) {
      out << csv::join({p.candidate_id, p.index_id, csv::format_double(p.probability),
                        p.label == PairLabel::match ? "1" : "0"})
          << '\n';
    }
  });
}

std::vector<Prediction> read_predictions(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || line != "candidate_id,index_id,probability,label") {
    throw SchemaError(path.string() + " is not a predictions file");
  }
  std::vector<Prediction> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 4) throw SchemaError("predictions row has wrong width");
    out.push_back({f[0], f[1], csv::parse_double(f[2]), f[3] == "1" ? PairLabel::match : PairLabel::non_match});
  }
  return out;
}

CandidateSet read_candidates(const fs::path& path) {
  std::istringstream in(read_text(path));
  return read_candidates_csv(in);
}

void relabel(std::vector<Prediction>& preds, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw DomainError("decision threshold must lie in (0, 1)");
  for (Prediction& p : preds) p.label = p.probability >= threshold ? PairLabel::match : PairLabel::non_match;
}

GroundTruth truth_from_labels(const std::vector<PairFeatureVector>& pairs) {
  GroundTruth t;
  for (const PairFeatureVector& p : pairs) {
    if (p.is_match()) t.add_match(p.candidate_id, p.index_id);
  }
  return t;
}

void print_table(const std::string& title, const MetricsReport& r) {
  std::cout << "# " << title << '\n';
  write_metrics_table(std::cout, r);
}

}  // namespace

int cmd_featurize(const FeaturizeOptions& o) {
  const auto start = Clock::now();
  const fs::path input(o.input);
  MeshDataset dataset;
  if (input.extension() == ".jsonl") {
    dataset = load_dataset(input, SourceTag::candidate, o.min_polygons);
  } else {
    CityJsonResult r = read_cityjson_file(input, o.min_polygons);
    for (const auto& skip : r.report.skipped) {
      std::cerr << "warning: skipped " << skip.object_id << ": " << skip.reason << '\n';
    }
    dataset = std::move(r.dataset);
  }
  if (dataset.empty()) std::cerr << "warning: no meshes in " << o.input << "; writing header only\n";
  const PropertyTable table = featurize(dataset, schema_from(o.properties), o.normalize);
  for (const PropertyVector& row : table.rows()) {
    for (const std::string& w : row.warnings) std::cerr << "warning: " << row.mesh_id << ": " << w << '\n';
  }
  if (o.output.empty() || o.output == "-") {
    write_property_csv(std::cout, table);
  } else {
    write_with(o.output, [&](std::ostream& out) { write_property_csv(out, table); });
  }
  std::cerr << "featurized " << table.size() << " meshes in " << csv::format_fixed(since(start), 3) << " s\n";
  return 0;
}

int cmd_gen_bench(const GenBenchOptions& o) {
  const auto start = Clock::now();
  GeneratorConfig cfg = o.generator;
  cfg.index_mode = parse_index_mode(o.index_mode);
  cfg.rigid_transform = !o.no_transform;
  const Benchmark bench = generate_benchmark(cfg);
  write_bundle(o.out, bench, Json{{"generation_seconds", since(start)}}.dump());
  std::cerr << "wrote " << bench.index.size() << " index and " << bench.candidates.size() << " candidate meshes ("
            << bench.truth.size() << " matches) to " << o.out << '\n';
  return 0;
}

int cmd_contaminate(const ContaminateOptions& o) {
  const Benchmark bench = read_bundle(o.bench);
  Json extra{{"source", o.bench}, {"level", o.level}, {"seed", o.seed}, {"mode", o.mode}};
  if (o.mode == "swap") {
    const Benchmark out = contaminate_swap(bench, o.level, o.seed);
    write_bundle(o.out, out, extra.dump());
    std::cerr << "swapped " << out.contaminated.size() - bench.contaminated.size() << " matched entities\n";
  } else if (o.mode == "dirty-clean") {
    const DirtyCleanVariant v = dirty_clean_variant(bench, o.level, o.seed);
    write_bundle(o.out, v.bench, extra.dump());
    write_with(fs::path(o.out) / "within_source.csv", [&](std::ostream& out) {
      out << "candidate_id,duplicate_id\n";
      for (const IdPair& p : v.within_source) out << csv::join({p.candidate_id, p.index_id}) << '\n';
    });
    std::cerr << "moved " << v.within_source.size() << " index twins into the candidate set\n";
  } else {
    throw DomainError("unknown contamination mode '" + o.mode + "' (swap or dirty-clean)");
  }
  return 0;
}

namespace {

MatcherConfig matcher_config(const std::string& kind, const TrainOptions& o) {
  MatcherConfig c = MatcherConfig::defaults(parse_ensemble_kind(kind));
  if (o.n_trees) c.n_trees = *o.n_trees;
  if (o.max_depth) c.max_depth = *o.max_depth;
  c.decision_threshold = o.threshold;
  return c;
}

int train_from_pairs(const TrainOptions& o) {
  if (o.model.empty()) throw DomainError("--pairs needs --model for the output file");
  const auto start = Clock::now();
  PropertySchema schema;
  const auto pairs = read_pairs_file(o.pairs, schema);
  MatcherConfig c = matcher_config(o.matcher_kind, o);
  c.seed = o.seed;
  if (o.grid_search) c = grid_search(pairs, schema, c);
  const TrainedMatcher model = train_matcher(pairs, schema, c);
  write_text(o.model, model.to_json());
  const auto ranked = feature_importance(model);
  for (std::size_t i = 0; i < std::min<std::size_t>(5, ranked.size()); ++i) {
    std::cout << ranked[i].first << ' ' << csv::format_fixed(ranked[i].second, 6) << '\n';
  }
  std::cerr << "trained " << c.n_trees << " trees on " << pairs.size() << " pairs in "
            << csv::format_fixed(since(start), 3) << " s\n";
  return 0;
}

}  // namespace

int cmd_train(const TrainOptions& o) {
  if (!o.pairs.empty()) return train_from_pairs(o);
  if (o.bench.empty() || o.run.empty()) throw DomainError("train needs --bench and --run (or --pairs and --model)");
  const auto start = Clock::now();
  const Benchmark bench = read_bundle(o.bench);

  PipelineConfig config;
  config.schema = schema_from(o.properties);
  config.ratio_mode = parse_ratio_mode(o.ratio_mode);
  config.split.train_ratio = o.train_ratio;
  config.split.negatives_per_positive = o.negatives;
  config.split.hard_negative_k = o.hard_k;
  config.blocking_model = matcher_config(o.blocking_kind, o);
  config.matcher = matcher_config(o.matcher_kind, o);
  config.fb_size = o.fb_size;
  config.k = o.k;
  config.criterion = parse_key_criterion(o.criterion);
  config.reseed(o.seed);

  const fs::path run(o.run);
  fs::create_directories(run);
  const FeatureTables tables = featurize_benchmark(bench, config.schema);
  const double featurize_s = since(start);
  TrainingArtifacts a = train_pipeline(bench, tables, config);
  Json grid = Json::array();
  if (o.grid_search) {
    std::vector<GridPoint> trace;
    config.matcher = grid_search(a.matching_train, config.schema, config.matcher, 5, &trace);
    a.matcher = train_matcher(a.matching_train, config.schema, config.matcher);
    for (const GridPoint& g : trace) {
      grid.push_back({{"max_depth", g.max_depth}, {"n_trees", g.n_trees}, {"accuracy", g.accuracy}});
    }
  }

  write_text(run / "config.json", config.to_json() + "\n");
  write_with(run / "truth.csv", [&](std::ostream& out) { write_truth_csv(out, bench.truth); });
  if (!bench.contaminated.empty()) {
    write_with(run / "contaminated.csv", [&](std::ostream& out) {
      out << "candidate_id\n";
      for (const std::string& id : bench.contaminated) out << id << '\n';
    });
  } else {
    fs::remove(run / "contaminated.csv");
  }
  write_with(run / "index_properties.csv", [&](std::ostream& out) { write_property_csv(out, tables.index_raw); });
  write_with(run / "candidate_properties.csv",
             [&](std::ostream& out) { write_property_csv(out, tables.candidates_raw); });
  write_text(run / "splits.json", splits_to_json(a.splits));
  write_pairs_file(run / "blocking_train_pairs.csv", config.schema, a.blocking_train);
  write_pairs_file(run / "matching_train_pairs.csv", config.schema, a.matching_train);
  write_pairs_file(run / "matching_test_pairs.csv", config.schema, a.matching_test);
  write_text(run / "blocking_model.json", a.blocking_model.to_json());
  write_text(run / "matcher_model.json", a.matcher.to_json());
  Json key{{"criterion", std::string(to_string(a.key.criterion))},
           {"fb_size", a.key.size()},
           {"features", a.key.names(config.schema)}};
  write_text(run / "key.json", key.dump(2) + "\n");

  record_step(run, "train", {{"bench", o.bench}, {"pipeline", Json::parse(config.to_json())}, {"grid", grid}},
              {{"featurize_seconds", featurize_s}, {"total_seconds", since(start)}, {"threads", thread_count()}});
  std::cerr << "trained on " << a.blocking_train.size() << " blocking and " << a.matching_train.size()
            << " matching pairs; key = ";
  for (const std::string& n : a.key.names(config.schema)) std::cerr << n << ' ';
  std::cerr << '\n';
  return 0;
}

int cmd_block(const BlockOptions& o) {
  const auto start = Clock::now();
  RunState s = load_run(o.run);
  if (o.k) s.config.k = *o.k;
  if (o.fb_size) s.config.fb_size = *o.fb_size;
  if (o.criterion) s.config.criterion = parse_key_criterion(*o.criterion);
  if (o.prune_quantile) s.config.prune_quantile = *o.prune_quantile;
  if (o.no_prune) s.config.prune_quantile.reset();

  const BlockingKey key = key_from_ranking(ranking_for(s, s.config.criterion), s.config.fb_size, s.config.criterion);
  if (s.config.k > s.splits.test_index.size()) {
    std::cerr << "warning: k=" << s.config.k << " exceeds the index size; clamped to " << s.splits.test_index.size()
              << '\n';
  }
  const BlockingRun run = run_blocking(s.bench, s.tables, s.splits, key, s.config);

  write_with(s.dir / "candidates.csv", [&](std::ostream& out) { write_candidates_csv(out, run.candidates); });
  write_with(s.dir / "calibration_distances.csv", [&](std::ostream& out) {
    out << "distance\n";
    for (double d : run.calibration_distances) out << csv::format_double(d) << '\n';
  });
  Json doc;
  doc["k"] = run.candidates.k;
  doc["fb_size"] = key.size();
  doc["criterion"] = std::string(to_string(key.criterion));
  doc["key"] = key.names(s.config.schema);
  doc["prune_quantile"] = s.config.prune_quantile ? Json(*s.config.prune_quantile) : Json();
  doc["threshold"] = run.threshold ? Json(*run.threshold) : Json();
  doc["num_candidates"] = s.splits.test_candidates.size();
  doc["num_index"] = s.splits.test_index.size();
  doc["metrics"] = metrics_doc(run.metrics);
  doc["pruning"] = run.pruning ? Json{{"rr_k", run.pruning->rr_k}, {"pc_k", run.pruning->pc_k}} : Json();
  write_text(s.dir / "blocking_metrics.json", doc.dump(2) + "\n");

  Json timing = timing_doc(run.metrics);
  timing["total_seconds"] = since(start);
  record_step(s.dir, "block", {{"k", s.config.k}, {"fb_size", s.config.fb_size},
                               {"criterion", std::string(to_string(s.config.criterion))},
                               {"prune_quantile", doc["prune_quantile"]}},
              timing);
  print_table("blocking", run.metrics);
  return 0;
}

int cmd_match(const MatchOptions& o) {
  const auto start = Clock::now();
  if (o.run.empty()) {
    if (o.model.empty() || o.pairs.empty()) throw DomainError("match needs --run, or --model with --pairs");
    const TrainedMatcher model = TrainedMatcher::load(o.model);
    PropertySchema schema;
    const auto pairs = read_pairs_file(o.pairs, schema);
    auto preds = predict(model, pairs, schema);
    if (o.threshold) relabel(preds, *o.threshold);
    if (!o.output.empty()) write_predictions(o.output, preds);
    const bool labelled = std::any_of(pairs.begin(), pairs.end(), [](const auto& p) { return p.label.has_value(); });
    if (labelled && !preds.empty()) print_table("matching", matching_metrics(preds, truth_from_labels(pairs)));
    std::cerr << "scored " << preds.size() << " pairs\n";
    return 0;
  }

  RunState s = load_run(o.run);
  const TrainedMatcher model = TrainedMatcher::load(o.model.empty() ? require_file(s.dir, "matcher_model.json")
                                                                    : fs::path(o.model));
  const double threshold = o.threshold.value_or(model.config().decision_threshold);

  PropertySchema schema;
  const auto test_pairs = read_pairs_file(require_file(s.dir, "matching_test_pairs.csv"), schema);
  const auto t0 = Clock::now();
  auto test_preds = predict(model, test_pairs, schema);
  relabel(test_preds, threshold);
  MetricsReport test = matching_metrics(test_preds, s.bench.truth);
  test.wall_time_s = since(t0);

  const CandidateSet blocked = read_candidates(require_file(s.dir, "candidates.csv"));
  std::vector<IdPair> ids;
  for (const CandidatePair& p : blocked.pairs) ids.push_back({p.candidate_id, p.index_id, std::nullopt});
  const auto blocked_pairs = pair_vectors(s.tables, ids, s.config.ratio_mode);
  const auto t1 = Clock::now();
  auto preds = predict(model, blocked_pairs, s.config.schema);
  relabel(preds, threshold);
  MetricsReport end_to_end = matching_metrics(preds, s.bench.truth);
  end_to_end.wall_time_s = since(t1);
  const auto contaminated = matching_metrics_for(test_preds, s.bench.truth, s.bench.contaminated);

  write_predictions(s.dir / "test_predictions.csv", test_preds);
  write_predictions(s.dir / "predictions.csv", preds);
  Json doc;
  doc["decision_threshold"] = threshold;
  doc["test"] = metrics_doc(test);
  doc["blocked"] = metrics_doc(end_to_end);
  doc["contaminated_test"] = contaminated ? metrics_doc(*contaminated) : Json();
  write_text(s.dir / "matching_metrics.json", doc.dump(2) + "\n");

  record_step(s.dir, "match", {{"decision_threshold", threshold}, {"model", o.model.empty() ? "matcher_model.json" : o.model}},
              {{"test_seconds", test.wall_time_s}, {"blocked_seconds", end_to_end.wall_time_s},
               {"total_seconds", since(start)}});
  print_table("matching (hard-negative test pairs)", test);
  print_table("matching (blocked candidates)", end_to_end);
  if (contaminated) print_table("matching (contaminated candidates)", *contaminated);
  return 0;
}

int cmd_eval(const EvalOptions& o) {
  if (o.run.empty()) {
    if (o.candidates.empty() || o.truth.empty() || o.num_candidates == 0 || o.num_index == 0) {
      throw DomainError("eval needs --run, or --candidates, --truth, --num-candidates and --num-index");
    }
    std::istringstream in(read_text(o.truth));
    const GroundTruth truth = read_truth_csv(in);
    const CandidateSet set = read_candidates(o.candidates);
    std::vector<std::size_t> ks;
    for (std::size_t k = 1; k <= set.k; ++k) ks.push_back(k);
    print_table("blocking", blocking_metrics(set, truth, o.num_candidates, o.num_index, ks));
    if (!o.predictions.empty()) print_table("matching", matching_metrics(read_predictions(o.predictions), truth));
    return 0;
  }

  const RunState s = load_run(o.run);
  std::set<std::string> cand_ids(s.splits.test_candidates.begin(), s.splits.test_candidates.end());
  std::set<std::string> index_ids(s.splits.test_index.begin(), s.splits.test_index.end());
  const GroundTruth scoped = s.bench.truth.restricted(cand_ids, index_ids);
  Json doc;
  const CandidateSet set = read_candidates(require_file(s.dir, "candidates.csv"));
  std::vector<std::size_t> ks;
  for (std::size_t k : s.config.report_ks) {
    if (k <= set.k) ks.push_back(k);
  }
  const MetricsReport blocking = blocking_metrics(set, scoped, cand_ids.size(), index_ids.size(), ks);
  doc["blocking"] = metrics_doc(blocking);
  print_table("blocking", blocking);
  for (const char* name : {"test_predictions.csv", "predictions.csv"}) {
    if (!fs::exists(s.dir / name)) continue;
    const MetricsReport m = matching_metrics(read_predictions(s.dir / name), s.bench.truth);
    doc[std::string(name) == "predictions.csv" ? "blocked" : "test"] = metrics_doc(m);
    print_table(std::string("matching (") + name + ")", m);
  }
  write_text(s.dir / "eval.json", doc.dump(2) + "\n");
  return 0;
}

int cmd_sweep(const SweepOptions& o) {
  const auto start = Clock::now();
  RunState s = load_run(o.run);
  const KeyCriterion criterion = o.criterion ? parse_key_criterion(*o.criterion) : s.config.criterion;
  const auto ranking = ranking_for(s, criterion);
  std::vector<std::size_t> fbs;
  for (std::size_t fb : o.fb_list) fbs.push_back(std::min(fb, s.config.schema.size()));
  fbs.erase(std::unique(fbs.begin(), fbs.end()), fbs.end());
  const auto points = sweep(subset_table(s.tables, s.splits.test_candidates, true),
                            subset_table(s.tables, s.splits.test_index, true), ranking, criterion, o.k_list, fbs,
                            s.bench.truth);
  write_with(s.dir / "sweep.csv", [&](std::ostream& out) { write_sweep_csv(out, points, false); });
  Json timing = Json::array();
  for (const SweepPoint& p : points) {
    timing.push_back({{"fb", p.fb}, {"k", p.k}, {"build_seconds", p.build_seconds}, {"query_seconds", p.query_seconds}});
  }
  record_step(s.dir, "sweep", {{"criterion", std::string(to_string(criterion))}, {"k_list", o.k_list}, {"fb_list", fbs}},
              {{"points", timing}, {"total_seconds", since(start)}});
  write_sweep_csv(std::cout, points, true);
  return 0;
}

int cmd_report(const ReportOptions& o) {
  const auto start = Clock::now();
  const RunState s = load_run(o.run);
  const fs::path out = s.dir / "report";
  fs::create_directories(out);

  std::ostringstream summary;
  if (fs::exists(s.dir / "blocking_metrics.json")) {
    const auto doc = nlohmann::json::parse(read_text(s.dir / "blocking_metrics.json"));
    summary << "# blocking (k=" << doc.at("k").get<std::size_t>() << ", |F_B|=" << doc.at("fb_size").get<std::size_t>()
            << ", " << doc.at("criterion").get<std::string>() << ")\n";
    write_metrics_table(summary, metrics_from_json(doc.at("metrics").dump()));
  }
  if (fs::exists(s.dir / "matching_metrics.json")) {
    const auto doc = nlohmann::json::parse(read_text(s.dir / "matching_metrics.json"));
    for (const char* section : {"test", "blocked", "contaminated_test"}) {
      if (!doc.contains(section) || doc.at(section).is_null()) continue;
      summary << "# matching (" << section << ")\n";
      write_metrics_table(summary, metrics_from_json(doc.at(section).dump()));
    }
  }
  write_text(out / "summary.txt", summary.str());

  std::set<std::string> cand_ids(s.splits.test_candidates.begin(), s.splits.test_candidates.end());
  std::set<std::string> index_ids(s.splits.test_index.begin(), s.splits.test_index.end());
  const GroundTruth scoped = s.bench.truth.restricted(cand_ids, index_ids);
  if (fs::exists(s.dir / "candidates.csv")) {
    const CandidateSet set = read_candidates(s.dir / "candidates.csv");
    std::vector<PcRrPoint> curve;
    for (std::size_t k = 1; k <= set.k; ++k) {
      const CandidateSet cut = set.truncated(k);
      curve.push_back({k, pair_completeness(cut, scoped), reduction_ratio(cut.size(), cand_ids.size(), index_ids.size())});
    }
    write_with(out / "pc_rr.csv", [&](std::ostream& o2) { write_pc_rr_csv(o2, curve); });
  }

  const BlockingKey key = key_from_ranking(ranking_for(s, s.config.criterion), s.config.fb_size, s.config.criterion);
  std::vector<PruningPoint> pruning;
  PipelineConfig cfg = s.config;
  cfg.prune_quantile.reset();
  const BlockingRun unpruned = run_blocking(s.bench, s.tables, s.splits, key, cfg);
  for (double q : {0.0, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99, 1.0}) {
    cfg.prune_quantile = q;
    const BlockingRun r = run_blocking(s.bench, s.tables, s.splits, key, cfg);
    pruning.push_back({q, *r.threshold, r.pruning->rr_k, r.pruning->pc_k});
  }
  const double inf = std::numeric_limits<double>::infinity();
  const PruningMetrics none = pruning_metrics(unpruned.candidates, unpruned.candidates, scoped, cand_ids.size());
  pruning.push_back({inf, inf, none.rr_k, none.pc_k});
  write_with(out / "pruning.csv", [&](std::ostream& o2) { write_pruning_csv(o2, pruning); });

  const auto blocking_pairs = pair_vectors(s.tables, s.splits.blocking_train, s.config.ratio_mode);
  std::vector<DiscrepancyProfile> profiles;
  for (std::size_t i = 0; i < s.config.schema.size(); ++i) {
    profiles.push_back(estimate_discrepancy(blocking_pairs, s.config.schema, s.config.schema.name(i)));
  }
  write_with(out / "eps_delta.csv", [&](std::ostream& o2) { write_eps_delta_csv(o2, profiles); });

  const TrainedMatcher matcher = TrainedMatcher::load(require_file(s.dir, "matcher_model.json"));
  const TrainedMatcher blocker = TrainedMatcher::load(require_file(s.dir, "blocking_model.json"));
  const auto ranked = feature_importance(matcher);
  const auto test_pairs = pair_vectors(s.tables, s.splits.matching_test, s.config.ratio_mode);
  std::vector<RatioDistribution> dists;
  for (std::size_t i = 0; i < std::min<std::size_t>(5, ranked.size()); ++i) {
    dists.push_back(ratio_distribution(test_pairs, s.config.schema, ranked[i].first, o.bin_width));
  }
  write_with(out / "ratio_distribution.csv", [&](std::ostream& o2) { write_ratio_distribution_csv(o2, dists); });
  write_with(out / "importance.csv", [&](std::ostream& o2) {
    o2 << "model,rank,property,score\n";
    for (const auto& [name, model] : {std::pair{"blocking", &blocker}, std::pair{"matcher", &matcher}}) {
      std::size_t rank = 1;
      for (const auto& [prop, score] : feature_importance(*model)) {
        o2 << name << ',' << rank++ << ',' << prop << ',' << csv::format_double(score) << '\n';
      }
    }
  });
  record_step(s.dir, "report", {{"bin_width", o.bin_width}}, {{"total_seconds", since(start)}});
  std::cout << summary.str();
  std::cerr << "report written to " << out.string() << '\n';
  return 0;
}

}  // namespace meshres::cli
