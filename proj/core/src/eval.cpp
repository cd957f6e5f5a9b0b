#include "meshres/eval.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "json.hpp"

#include "meshres/csv.hpp"
#include "meshres/error.hpp"

namespace meshres {

void GroundTruth::add_match(const std::string& candidate_id, const std::string& index_id) {
  if (by_candidate_.contains(candidate_id)) {
    throw SchemaError("candidate '" + candidate_id + "' already has a match (clean-clean violated)");
  }
  if (by_index_.contains(index_id)) {
    throw SchemaError("index object '" + index_id + "' already has a match (clean-clean violated)");
  }
  if (unmatched_.contains(candidate_id)) throw SchemaError("candidate '" + candidate_id + "' is marked unmatched");
  matches_.emplace_back(candidate_id, index_id);
  by_candidate_.emplace(candidate_id, index_id);
  by_index_.emplace(index_id, candidate_id);
}

void GroundTruth::add_unmatched(const std::string& candidate_id) {
  if (by_candidate_.contains(candidate_id)) throw SchemaError("candidate '" + candidate_id + "' has a match");
  unmatched_.insert(candidate_id);
}

const std::string* GroundTruth::index_for(std::string_view candidate_id) const {
  const auto it = by_candidate_.find(std::string(candidate_id));
  return it == by_candidate_.end() ? nullptr : &it->second;
}

const std::string* GroundTruth::candidate_for(std::string_view index_id) const {
  const auto it = by_index_.find(std::string(index_id));
  return it == by_index_.end() ? nullptr : &it->second;
}

bool GroundTruth::is_match(std::string_view candidate_id, std::string_view index_id) const {
  const std::string* idx = index_for(candidate_id);
  return idx != nullptr && *idx == index_id;
}

GroundTruth GroundTruth::restricted(const std::set<std::string>& candidate_ids,
                                    const std::set<std::string>& index_ids) const {
  GroundTruth out;
  for (const auto& [c, i] : matches_) {
    if (candidate_ids.contains(c) && index_ids.contains(i)) out.add_match(c, i);
  }
  for (const std::string& c : unmatched_) {
    if (candidate_ids.contains(c)) out.add_unmatched(c);
  }
  return out;
}

void write_truth_csv(std::ostream& out, const GroundTruth& truth) {
  out << "candidate_id,index_id\n";
  auto sorted = truth.matches();
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [c, i] : sorted) out << csv::join({c, i}) << '\n';
}

GroundTruth read_truth_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || csv::split(line) != std::vector<std::string>{"candidate_id", "index_id"}) {
    throw SchemaError("truth CSV must start with candidate_id,index_id");
  }
  GroundTruth truth;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 2) throw SchemaError("truth CSV row has wrong width");
    truth.add_match(f[0], f[1]);
  }
  return truth;
}

void MetricsReport::check() const {
  auto in_range = [](const std::optional<double>& v, const char* name) {
    if (v && !(*v >= 0.0 && *v <= 100.0)) throw InvariantError(std::string(name) + " outside [0, 100]");
  };
  in_range(pc, "PC");
  in_range(rr, "RR");
  in_range(precision, "precision");
  in_range(recall, "recall");
  in_range(f1, "F1");
  for (const auto& [k, v] : pc_at_k) in_range(v, "PC@k");
  if (precision && recall && f1) {
    const double p = *precision;
    const double r = *recall;
    const double expected = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    if (std::abs(expected - *f1) > 1e-9) throw InvariantError("F1 is not the harmonic mean of precision and recall");
  }
}

double reduction_ratio(std::size_t pairs, std::size_t num_candidates, std::size_t num_index) {
  if (num_candidates == 0 || num_index == 0) throw DomainError("reduction ratio needs non-empty datasets");
  const double total = static_cast<double>(num_candidates) * static_cast<double>(num_index);
  if (static_cast<double>(pairs) > total) throw DomainError("more candidate pairs than the cross product");
  return 100.0 * (1.0 - static_cast<double>(pairs) / total);
}

double pair_completeness(const CandidateSet& set, const GroundTruth& truth) {
  if (truth.size() == 0) throw DomainError("pair completeness is undefined without true matches");
  std::unordered_set<std::string> found;
  for (const CandidatePair& p : set.pairs) {
    if (truth.is_match(p.candidate_id, p.index_id)) found.insert(p.candidate_id);
  }
  return 100.0 * static_cast<double>(found.size()) / static_cast<double>(truth.size());
}

MetricsReport blocking_metrics(const CandidateSet& set, const GroundTruth& truth, std::size_t num_candidates,
                               std::size_t num_index, std::span<const std::size_t> ks) {
  MetricsReport r;
  r.num_pairs = set.size();
  r.rr = reduction_ratio(set.size(), num_candidates, num_index);
  r.pc = pair_completeness(set, truth);
  for (std::size_t k : ks) r.pc_at_k[k] = pair_completeness(set.truncated(k), truth);
  r.wall_time_s = set.query_seconds;
  r.check();
  return r;
}

PruningMetrics pruning_metrics(const CandidateSet& pruned, const CandidateSet& unpruned, const GroundTruth& truth,
                               std::size_t num_candidates) {
  if (unpruned.k == 0 || num_candidates == 0) throw DomainError("pruning metrics need k >= 1 and candidates");
  const double base = pair_completeness(unpruned, truth);
  if (base == 0.0) throw DomainError("unpruned candidate set contains no true match");
  PruningMetrics m;
  m.rr_k = 1.0 - static_cast<double>(pruned.size()) /
                     (static_cast<double>(unpruned.k) * static_cast<double>(num_candidates));
  m.pc_k = pair_completeness(pruned, truth) / base;
  return m;
}

MetricsReport matching_metrics(std::span<const Prediction> predictions, const GroundTruth& truth) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const Prediction& p : predictions) {
    const bool actual = truth.is_match(p.candidate_id, p.index_id);
    const bool predicted = p.label == PairLabel::match;
    if (predicted && actual) ++tp;
    if (predicted && !actual) ++fp;
    if (!predicted && actual) ++fn;
  }
  MetricsReport r;
  r.num_pairs = predictions.size();
  if (tp + fp == 0) {
    r.precision = 0.0;
    r.flags.emplace_back("precision_undefined");
  } else {
    r.precision = 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  if (tp + fn == 0) {
    r.recall = 0.0;
    r.flags.emplace_back("recall_undefined");
  } else {
    r.recall = 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
  const double s = *r.precision + *r.recall;
  if (s > 0.0) {
    r.f1 = 2.0 * *r.precision * *r.recall / s;
  } else {
    r.f1 = 0.0;
    r.flags.emplace_back("f1_undefined");
  }
  r.check();
  return r;
}

std::string metrics_json(const MetricsReport& r, bool include_timing) {
  nlohmann::ordered_json doc;
  auto put = [&](const char* key, const std::optional<double>& v) {
    doc[key] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  put("pc", r.pc);
  put("rr", r.rr);
  auto at_k = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.pc_at_k) at_k[std::to_string(k)] = v;
  doc["pc_at_k"] = std::move(at_k);
  put("precision", r.precision);
  put("recall", r.recall);
  put("f1", r.f1);
  doc["flags"] = r.flags;
  doc["num_pairs"] = r.num_pairs;
  if (include_timing) {
    doc["wall_time_s"] = r.wall_time_s;
    doc["build_time_s"] = r.build_time_s;
  }
  return doc.dump(2) + "\n";
}

MetricsReport metrics_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("metrics file is not valid JSON: ") + e.what(), e.byte);
  }
  try {
    MetricsReport r;
    auto get = [&](const char* key) -> std::optional<double> {
      if (!doc.contains(key) || doc[key].is_null()) return std::nullopt;
      return doc[key].get<double>();
    };
    r.pc = get("pc");
    r.rr = get("rr");
    r.precision = get("precision");
    r.recall = get("recall");
    r.f1 = get("f1");
    if (doc.contains("pc_at_k")) {
      for (const auto& [k, v] : doc["pc_at_k"].items()) {
        r.pc_at_k[static_cast<std::size_t>(csv::parse_int(k))] = v.get<double>();
      }
    }
    if (doc.contains("flags")) r.flags = doc["flags"].get<std::vector<std::string>>();
    r.num_pairs = doc.value("num_pairs", std::size_t{0});
    r.wall_time_s = doc.value("wall_time_s", 0.0);
    r.build_time_s = doc.value("build_time_s", 0.0);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed metrics document: ") + e.what());
  }
}

void write_metrics_table(std::ostream& out, const MetricsReport& r) {
  auto row = [&](const std::string& name, const std::string& value) {
    out << name << std::string(name.size() < 14 ? 14 - name.size() : 1, ' ') << value << '\n';
  };
  auto pct = [](const std::optional<double>& v) { return v ? csv::format_fixed(*v, 4) : std::string("n/a"); };
  row("metric", "value");
  row("PC", pct(r.pc));
  row("RR", r.rr ? csv::format_fixed(*r.rr, 6) : std::string("n/a"));
  for (const auto& [k, v] : r.pc_at_k) row("PC@" + std::to_string(k), csv::format_fixed(v, 4));
  row("precision", pct(r.precision));
  row("recall", pct(r.recall));
  row("F1", pct(r.f1));
  row("pairs", std::to_string(r.num_pairs));
  row("wall_time_s", csv::format_fixed(r.wall_time_s, 6));
  row("build_time_s", csv::format_fixed(r.build_time_s, 6));
  for (const std::string& f : r.flags) row("flag", f);
}

void write_pc_rr_csv(std::ostream& out, std::span<const PcRrPoint> points) {
  out << "k,pc,rr\n";
  for (const PcRrPoint& p : points) {
    out << p.k << ',' << csv::format_fixed(p.pc, 6) << ',' << csv::format_fixed(p.rr, 6) << '\n';
  }
}

void write_pruning_csv(std::ostream& out, std::span<const PruningPoint> points) {
  out << "quantile,threshold,rr_k,pc_k\n";
  for (const PruningPoint& p : points) {
    out << csv::format_double(p.quantile) << ',' << csv::format_double(p.threshold) << ','
        << csv::format_fixed(p.rr_k, 6) << ',' << csv::format_fixed(p.pc_k, 6) << '\n';
  }
}

}  // namespace meshres
