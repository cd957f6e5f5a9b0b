#include "meshres/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "meshres/clock.hpp"
#include "meshres/csv.hpp"
#include "meshres/error.hpp"
#include "meshres/mesh_io.hpp"
#include "meshres/parallel.hpp"
#include "meshres/random.hpp"

namespace meshres {

namespace {

constexpr const char* kBundleFormat = "meshres-bench/1";

// Stream ids for derive_seed; entity e uses e itself.
constexpr std::uint64_t kStreamReplace = 0xA000000001ULL;
constexpr std::uint64_t kStreamIds = 0xA000000002ULL;
constexpr std::uint64_t kStreamFresh = 0xB000000000ULL;
constexpr std::uint64_t kStreamExtra = 0xC000000000ULL;
constexpr std::uint64_t kStreamCandidate = 0xD000000000ULL;

struct Footprint {
  std::vector<double> angles;
  std::vector<double> radii;
  double aspect = 1.0;
  double height = 10.0;
};

struct Placement {
  double yaw = 0.0;
  double tx = 0.0;
  double ty = 0.0;
  double z0 = 0.0;
};

Footprint random_footprint(Rng& rng, std::size_t complexity) {
  const std::size_t lo = std::max<std::size_t>(3, (complexity + 1) / 2);
  const std::size_t hi = std::max(lo, complexity);
  const std::size_t n = std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Footprint f;
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
  const double radius = std::exp(std::log(4.0) + u01(rng) * (std::log(30.0) - std::log(4.0)));
  for (std::size_t i = 0; i < n; ++i) {
    f.angles.push_back((static_cast<double>(i) + 0.7 * (u01(rng) - 0.5)) * step);
    f.radii.push_back(radius * (0.55 + 0.45 * u01(rng)));
  }
  f.aspect = 1.0 + 2.0 * u01(rng);
  f.height = 3.0 + 57.0 * u01(rng);
  return f;
}

Placement random_placement(Rng& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Placement p;
  p.yaw = 2.0 * std::numbers::pi * u01(rng);
  p.tx = 1e4 + 9e4 * u01(rng);
  p.ty = 1e4 + 9e4 * u01(rng);
  p.z0 = 5.0 * u01(rng);
  return p;
}

// Applies the configured discrepancy: per-vertex radial factors and one
// height factor.
Footprint distort(const Footprint& f, const GeneratorConfig& cfg, Rng& rng) {
  std::normal_distribution<double> fp(0.0, 1.0);
  Footprint out = f;
  for (double& r : out.radii) {
    const double noise = cfg.footprint.sigma > 0.0 ? cfg.footprint.sigma * fp(rng) : 0.0;
    r *= std::max(cfg.footprint.r_g * (1.0 + noise), 1e-3);
  }
  const double noise = cfg.height.sigma > 0.0 ? cfg.height.sigma * fp(rng) : 0.0;
  out.height *= std::max(cfg.height.r_g * (1.0 + noise), 1e-3);
  return out;
}

struct Point {
  double x;
  double y;
};

std::vector<Point> outline(const Footprint& f) {
  const double sx = std::sqrt(f.aspect);
  std::vector<Point> pts;
  for (std::size_t i = 0; i < f.angles.size(); ++i) {
    pts.push_back({f.radii[i] * std::cos(f.angles[i]) * sx, f.radii[i] * std::sin(f.angles[i]) / sx});
  }
  return pts;
}

// Splits up to `max_extra` distinct outline edges at a random interior
// point. The shape is unchanged; vertex count, ring lengths and the vertex
// distribution are not.
std::vector<Point> retessellate(std::vector<Point> pts, std::size_t max_extra, Rng& rng) {
  if (max_extra == 0) return pts;
  const std::size_t extra = std::uniform_int_distribution<std::size_t>(0, std::min(max_extra, pts.size()))(rng);
  std::vector<std::size_t> edges(pts.size());
  std::iota(edges.begin(), edges.end(), std::size_t{0});
  std::shuffle(edges.begin(), edges.end(), rng);
  std::vector<bool> split(pts.size(), false);
  for (std::size_t i = 0; i < extra; ++i) split[edges[i]] = true;
  std::uniform_real_distribution<double> at(0.2, 0.8);
  std::vector<Point> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out.push_back(pts[i]);
    if (split[i]) {
      const Point& a = pts[i];
      const Point& b = pts[(i + 1) % pts.size()];
      const double t = at(rng);
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

PolygonMesh extrude(std::string id, const std::vector<Point>& pts, double height, const Placement& p,
                    SourceTag source) {
  const std::size_t n = pts.size();
  const double c = std::cos(p.yaw);
  const double s = std::sin(p.yaw);
  PolygonMesh mesh;
  mesh.mesh_id = std::move(id);
  mesh.source = source;
  mesh.vertices.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = c * pts[i].x - s * pts[i].y + p.tx;
    const double y = s * pts[i].x + c * pts[i].y + p.ty;
    mesh.vertices[i] = {x, y, p.z0};
    mesh.vertices[n + i] = {x, y, p.z0 + height};
  }
  Polygon bottom, top;
  for (std::size_t i = 0; i < n; ++i) {
    bottom.vertex_ids.push_back(static_cast<std::uint32_t>(n - 1 - i));
    top.vertex_ids.push_back(static_cast<std::uint32_t>(n + i));
  }
  mesh.polygons.push_back(std::move(bottom));
  mesh.polygons.push_back(std::move(top));
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = static_cast<std::uint32_t>(i);
    const auto b = static_cast<std::uint32_t>((i + 1) % n);
    mesh.polygons.push_back({{a, b, static_cast<std::uint32_t>(n + b), static_cast<std::uint32_t>(n + a)}});
  }
  return mesh;
}

PolygonMesh extrude(std::string id, const Footprint& f, const Placement& p, SourceTag source) {
  return extrude(std::move(id), outline(f), f.height, p, source);
}

std::string make_id(const char* prefix, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%07zu", prefix, n);
  return buf;
}

std::size_t count_for(double level, std::size_t total) {
  return static_cast<std::size_t>(std::ceil(level * static_cast<double>(total) - 1e-9));
}

void check_level(double level) {
  if (!(level >= 0.0 && level <= 0.5)) throw DomainError("contamination level must lie in [0, 0.5]");
}

std::vector<std::pair<std::string, std::string>> shuffled_matches(const GroundTruth& truth, std::uint64_t seed) {
  auto matches = truth.matches();
  std::sort(matches.begin(), matches.end());
  Rng rng(seed);
  std::shuffle(matches.begin(), matches.end(), rng);
  return matches;
}

}  // namespace

std::string_view to_string(IndexMode mode) { return mode == IndexMode::containment ? "containment" : "disjoint"; }

IndexMode parse_index_mode(std::string_view text) {
  if (text == "containment") return IndexMode::containment;
  if (text == "disjoint") return IndexMode::disjoint;
  throw SchemaError("unknown index mode '" + std::string(text) + "'");
}

void GeneratorConfig::validate() const {
  if (n_entities == 0) throw DomainError("n_entities must be positive");
  for (const Discrepancy* d : {&footprint, &height}) {
    if (!(d->r_g > 0.0)) throw DomainError("discrepancy r_g must be positive");
    if (!(d->sigma >= 0.0)) throw DomainError("discrepancy sigma must be non-negative");
  }
  if (footprint_complexity < 3) throw DomainError("footprint_complexity must be at least 3");
  if (!(unmatched_fraction >= 0.0 && unmatched_fraction < 1.0)) {
    throw DomainError("unmatched_fraction must lie in [0, 1)");
  }
}

std::string GeneratorConfig::to_json() const {
  nlohmann::ordered_json j;
  j["n_entities"] = n_entities;
  j["seed"] = seed;
  j["footprint"] = {{"r_g", footprint.r_g}, {"sigma", footprint.sigma}};
  j["height"] = {{"r_g", height.r_g}, {"sigma", height.sigma}};
  j["footprint_complexity"] = footprint_complexity;
  j["unmatched_fraction"] = unmatched_fraction;
  j["extra_vertices"] = extra_vertices;
  j["rigid_transform"] = rigid_transform;
  j["index_mode"] = std::string(to_string(index_mode));
  j["extra_index"] = extra_index;
  return j.dump();
}

GeneratorConfig GeneratorConfig::from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    GeneratorConfig c;
    c.n_entities = j.at("n_entities").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.footprint = {j.at("footprint").at("r_g").get<double>(), j.at("footprint").at("sigma").get<double>()};
    c.height = {j.at("height").at("r_g").get<double>(), j.at("height").at("sigma").get<double>()};
    c.footprint_complexity = j.at("footprint_complexity").get<std::size_t>();
    c.unmatched_fraction = j.at("unmatched_fraction").get<double>();
    c.extra_vertices = j.at("extra_vertices").get<std::size_t>();
    c.rigid_transform = j.at("rigid_transform").get<bool>();
    c.index_mode = parse_index_mode(j.at("index_mode").get<std::string>());
    c.extra_index = j.at("extra_index").get<std::size_t>();
    c.validate();
    return c;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("generator config is not valid JSON: ") + e.what(), e.byte);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed generator config: ") + e.what());
  }
}

Benchmark generate_benchmark(const GeneratorConfig& config) {
  config.validate();
  const std::size_t n = config.n_entities;

  std::vector<std::size_t> slots(n);
  std::iota(slots.begin(), slots.end(), std::size_t{0});
  Rng replace_rng(derive_seed(config.seed, kStreamReplace));
  std::shuffle(slots.begin(), slots.end(), replace_rng);
  const auto n_unmatched = static_cast<std::size_t>(std::llround(config.unmatched_fraction * static_cast<double>(n)));
  std::vector<bool> unmatched(n, false);
  for (std::size_t i = 0; i < n_unmatched; ++i) unmatched[slots[i]] = true;

  std::vector<std::size_t> cand_number(n);
  std::iota(cand_number.begin(), cand_number.end(), std::size_t{0});
  Rng id_rng(derive_seed(config.seed, kStreamIds));
  std::shuffle(cand_number.begin(), cand_number.end(), id_rng);

  std::vector<PolygonMesh> index_meshes(n), cand_meshes(n), extra_meshes(config.extra_index);
  parallel_for(n, [&](std::size_t e) {
    Rng rng(derive_seed(config.seed, e));
    const Footprint base = random_footprint(rng, config.footprint_complexity);
    const Placement where = random_placement(rng);
    index_meshes[e] = extrude(make_id("idx", e), base, where, SourceTag::index);

    Rng cand_rng(derive_seed(config.seed, kStreamCandidate + e));
    const std::string cid = make_id("cand", cand_number[e]);
    if (unmatched[e]) {
      Rng fresh(derive_seed(config.seed, kStreamFresh + e));
      const Footprint other = random_footprint(fresh, config.footprint_complexity);
      cand_meshes[e] = extrude(cid, other, random_placement(fresh), SourceTag::candidate);
    } else {
      const Footprint twin = distort(base, config, cand_rng);
      const Placement there = config.rigid_transform ? random_placement(cand_rng) : where;
      cand_meshes[e] = extrude(cid, retessellate(outline(twin), config.extra_vertices, cand_rng), twin.height,
                               there, SourceTag::candidate);
    }
  });
  parallel_for(config.extra_index, [&](std::size_t x) {
    Rng rng(derive_seed(config.seed, kStreamExtra + x));
    const Footprint f = random_footprint(rng, config.footprint_complexity);
    extra_meshes[x] = extrude(make_id("idx", n + x), f, random_placement(rng), SourceTag::index);
  });

  Benchmark bench;
  bench.config = config;
  for (std::size_t e = 0; e < n; ++e) {
    if (unmatched[e] && config.index_mode == IndexMode::disjoint) continue;
    bench.index.add(std::move(index_meshes[e]));
  }
  for (PolygonMesh& m : extra_meshes) bench.index.add(std::move(m));

  std::vector<std::size_t> by_cand_id(n);
  for (std::size_t e = 0; e < n; ++e) by_cand_id[cand_number[e]] = e;
  for (std::size_t number = 0; number < n; ++number) {
    const std::size_t e = by_cand_id[number];
    if (unmatched[e]) {
      bench.truth.add_unmatched(cand_meshes[e].mesh_id);
    } else {
      bench.truth.add_match(cand_meshes[e].mesh_id, make_id("idx", e));
    }
    bench.candidates.add(std::move(cand_meshes[e]));
  }
  return bench;
}

void write_bundle(const std::filesystem::path& dir, const Benchmark& bench, std::string_view extra_manifest_json) {
  std::filesystem::create_directories(dir);
  write_jsonl_file(dir / "index.jsonl", bench.index);
  write_jsonl_file(dir / "candidates.jsonl", bench.candidates);
  {
    std::ofstream out(dir / "truth.csv", std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / "truth.csv").string());
    write_truth_csv(out, bench.truth);
  }
  const auto contaminated_path = dir / "contaminated.csv";
  if (!bench.contaminated.empty()) {
    std::ofstream out(contaminated_path, std::ios::binary);
    out << "candidate_id\n";
    for (const std::string& id : bench.contaminated) out << id << '\n';
  } else {
    std::filesystem::remove(contaminated_path);
  }
  nlohmann::ordered_json manifest;
  manifest["format"] = kBundleFormat;
  manifest["created"] = utc_timestamp();
  manifest["generator"] = nlohmann::ordered_json::parse(bench.config.to_json());
  manifest["counts"] = {{"index", bench.index.size()},
                        {"candidates", bench.candidates.size()},
                        {"matches", bench.truth.size()},
                        {"contaminated", bench.contaminated.size()}};
  manifest["extra"] = nlohmann::ordered_json::parse(extra_manifest_json);
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  out << manifest.dump(2) << '\n';
}

Benchmark read_bundle(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("benchmark directory " + dir.string() + " does not exist");
  Benchmark bench;
  {
    std::ifstream in(dir / "manifest.json", std::ios::binary);
    if (!in) throw Error("missing " + (dir / "manifest.json").string());
    std::stringstream buf;
    buf << in.rdbuf();
    nlohmann::json manifest;
    try {
      manifest = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("bundle manifest is not valid JSON: ") + e.what(), e.byte);
    }
    if (manifest.value("format", std::string()) != kBundleFormat) throw SchemaError("unsupported bundle format");
    if (!manifest.contains("generator")) throw SchemaError("bundle manifest lacks the generator config");
    bench.config = GeneratorConfig::from_json(manifest["generator"].dump());
  }
  bench.index = load_dataset(dir / "index.jsonl", SourceTag::index);
  bench.candidates = load_dataset(dir / "candidates.jsonl", SourceTag::candidate);
  {
    std::ifstream in(dir / "truth.csv", std::ios::binary);
    if (!in) throw Error("missing " + (dir / "truth.csv").string());
    bench.truth = read_truth_csv(in);
  }
  for (const auto& [c, i] : bench.truth.matches()) {
    if (!bench.candidates.contains(c) || !bench.index.contains(i)) {
      throw SchemaError("truth pair (" + c + ", " + i + ") references an unknown id");
    }
  }
  for (const PolygonMesh& m : bench.candidates.meshes()) {
    if (bench.truth.index_for(m.mesh_id) == nullptr) bench.truth.add_unmatched(m.mesh_id);
  }
  std::ifstream in(dir / "contaminated.csv", std::ios::binary);
  if (in) {
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (!line.empty()) bench.contaminated.push_back(line);
    }
  }
  return bench;
}

void SplitPolicy::validate() const {
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) throw DomainError("train_ratio must lie in (0, 1)");
  if (negatives_per_positive < 1 || hard_negative_k < 1) throw DomainError("negative counts must be at least 1");
}

Splits split_ids(const Benchmark& bench, const SplitPolicy& policy) {
  policy.validate();
  const auto matches = shuffled_matches(bench.truth, derive_seed(policy.seed, 1));
  const auto n_train = static_cast<std::size_t>(std::llround(policy.train_ratio * static_cast<double>(matches.size())));
  if (n_train == 0 || n_train >= matches.size()) {
    throw Error("train_ratio " + csv::format_double(policy.train_ratio) + " leaves an empty side with " +
                std::to_string(matches.size()) + " matched entities");
  }

  std::vector<std::string> unmatched;
  for (const PolygonMesh& m : bench.candidates.meshes()) {
    if (bench.truth.index_for(m.mesh_id) == nullptr) unmatched.push_back(m.mesh_id);
  }
  std::sort(unmatched.begin(), unmatched.end());
  Rng urng(derive_seed(policy.seed, 2));
  std::shuffle(unmatched.begin(), unmatched.end(), urng);
  const auto n_unmatched_test =
      static_cast<std::size_t>(std::llround((1.0 - policy.train_ratio) * static_cast<double>(unmatched.size())));

  std::vector<std::string> orphans;
  for (const PolygonMesh& m : bench.index.meshes()) {
    if (bench.truth.candidate_for(m.mesh_id) == nullptr) orphans.push_back(m.mesh_id);
  }

  Splits s;
  for (std::size_t i = 0; i < matches.size(); ++i) {
    auto& cands = i < n_train ? s.train_candidates : s.test_candidates;
    auto& index = i < n_train ? s.train_index : s.test_index;
    cands.push_back(matches[i].first);
    index.push_back(matches[i].second);
  }
  for (std::size_t i = 0; i < n_unmatched_test; ++i) s.test_candidates.push_back(unmatched[i]);
  for (const std::string& o : orphans) {
    s.train_index.push_back(o);
    s.test_index.push_back(o);
  }
  std::sort(s.test_candidates.begin(), s.test_candidates.end());
  std::sort(s.train_index.begin(), s.train_index.end());
  std::sort(s.test_index.begin(), s.test_index.end());

  if (s.train_index.size() < policy.negatives_per_positive + 1) {
    throw Error("training index universe too small for " + std::to_string(policy.negatives_per_positive) +
                " negatives per positive");
  }
  Rng nrng(derive_seed(policy.seed, 3));
  std::uniform_int_distribution<std::size_t> pick(0, s.train_index.size() - 1);
  for (const std::string& c : s.train_candidates) {
    const std::string& twin = *bench.truth.index_for(c);
    s.blocking_train.push_back({c, twin, PairLabel::match});
    std::unordered_set<std::string> used{twin};
    for (std::size_t j = 0; j < policy.negatives_per_positive;) {
      const std::string& other = s.train_index[pick(nrng)];
      if (!used.insert(other).second) continue;
      s.blocking_train.push_back({c, other, PairLabel::non_match});
      ++j;
    }
  }
  std::sort(s.train_candidates.begin(), s.train_candidates.end());
  return s;
}

namespace {

std::vector<IdPair> hard_pairs(const GroundTruth& truth, const std::vector<std::string>& candidates,
                               const std::vector<std::string>& index, std::size_t k, const Blocker& blocker) {
  const auto neighbours = blocker(candidates, index, k);
  if (neighbours.size() != candidates.size()) throw InvariantError("blocker returned the wrong number of lists");
  std::vector<IdPair> pairs;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const std::string* twin = truth.index_for(candidates[i]);
    bool seen = false;
    for (std::size_t r = 0; r < std::min(k, neighbours[i].size()); ++r) {
      const bool match = twin != nullptr && *twin == neighbours[i][r];
      seen = seen || match;
      pairs.push_back({candidates[i], neighbours[i][r], match ? PairLabel::match : PairLabel::non_match});
    }
    if (twin != nullptr && !seen) pairs.push_back({candidates[i], *twin, PairLabel::match});
  }
  return pairs;
}

}  // namespace

namespace {

nlohmann::ordered_json pairs_json(const std::vector<IdPair>& pairs) {
  auto arr = nlohmann::ordered_json::array();
  for (const IdPair& p : pairs) {
    arr.push_back({p.candidate_id, p.index_id, p.label ? (p.label == PairLabel::match ? 1 : 0) : -1});
  }
  return arr;
}

std::vector<IdPair> pairs_from(const nlohmann::json& arr) {
  std::vector<IdPair> out;
  for (const auto& e : arr) {
    IdPair p{e.at(0).get<std::string>(), e.at(1).get<std::string>(), std::nullopt};
    const int label = e.at(2).get<int>();
    if (label >= 0) p.label = label == 1 ? PairLabel::match : PairLabel::non_match;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::string splits_to_json(const Splits& s) {
  nlohmann::ordered_json j;
  j["format"] = "meshres-splits/1";
  j["train_candidates"] = s.train_candidates;
  j["test_candidates"] = s.test_candidates;
  j["train_index"] = s.train_index;
  j["test_index"] = s.test_index;
  j["blocking_train"] = pairs_json(s.blocking_train);
  j["matching_train"] = pairs_json(s.matching_train);
  j["matching_test"] = pairs_json(s.matching_test);
  return j.dump() + "\n";
}

Splits splits_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "meshres-splits/1") throw SchemaError("unsupported splits format");
    Splits s;
    s.train_candidates = j.at("train_candidates").get<std::vector<std::string>>();
    s.test_candidates = j.at("test_candidates").get<std::vector<std::string>>();
    s.train_index = j.at("train_index").get<std::vector<std::string>>();
    s.test_index = j.at("test_index").get<std::vector<std::string>>();
    s.blocking_train = pairs_from(j.at("blocking_train"));
    s.matching_train = pairs_from(j.at("matching_train"));
    s.matching_test = pairs_from(j.at("matching_test"));
    return s;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("splits file is not valid JSON: ") + e.what(), e.byte);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed splits file: ") + e.what());
  }
}

Splits build_splits(const Benchmark& bench, const SplitPolicy& policy, const Blocker& blocker) {
  Splits s = split_ids(bench, policy);
  s.matching_train = hard_pairs(bench.truth, s.train_candidates, s.train_index, policy.hard_negative_k, blocker);
  s.matching_test = hard_pairs(bench.truth, s.test_candidates, s.test_index, policy.hard_negative_k, blocker);
  return s;
}

namespace {

struct Geometry {
  std::vector<Vertex3> vertices;
  std::vector<Polygon> polygons;
};

MeshDataset rebuild(const MeshDataset& src, const std::unordered_map<std::string, Geometry>& replace) {
  MeshDataset out(src.role());
  for (const PolygonMesh& m : src.meshes()) {
    PolygonMesh copy = m;
    if (auto it = replace.find(m.mesh_id); it != replace.end()) {
      copy.vertices = it->second.vertices;
      copy.polygons = it->second.polygons;
    }
    out.add(std::move(copy));
  }
  return out;
}

}  // namespace

Benchmark contaminate_swap(const Benchmark& bench, double level, std::uint64_t seed) {
  check_level(level);
  const auto matches = shuffled_matches(bench.truth, derive_seed(seed, 11));
  const std::size_t m = count_for(level, matches.size());
  std::unordered_map<std::string, Geometry> cand_geo, index_geo;
  std::vector<std::string> touched = bench.contaminated;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& [c, x] = matches[i];
    const PolygonMesh& cm = bench.candidates.at(c);
    const PolygonMesh& im = bench.index.at(x);
    cand_geo[c] = {im.vertices, im.polygons};
    index_geo[x] = {cm.vertices, cm.polygons};
    touched.push_back(c);
  }
  Benchmark out;
  out.config = bench.config;
  out.index = rebuild(bench.index, index_geo);
  out.candidates = rebuild(bench.candidates, cand_geo);
  out.truth = bench.truth;
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  out.contaminated = std::move(touched);
  return out;
}

DirtyCleanVariant dirty_clean_variant(const Benchmark& bench, double level, std::uint64_t seed) {
  check_level(level);
  const auto matches = shuffled_matches(bench.truth, derive_seed(seed, 12));
  const std::size_t m = count_for(level, matches.size());
  std::unordered_set<std::string> moved;
  DirtyCleanVariant v;
  for (std::size_t i = 0; i < m; ++i) {
    moved.insert(matches[i].second);
    v.within_source.push_back({matches[i].first, matches[i].second, PairLabel::match});
  }
  std::sort(v.within_source.begin(), v.within_source.end(),
            [](const IdPair& a, const IdPair& b) { return a.candidate_id < b.candidate_id; });

  v.bench.config = bench.config;
  v.bench.contaminated = bench.contaminated;
  v.bench.index = MeshDataset(SourceTag::index);
  v.bench.candidates = MeshDataset(SourceTag::candidate);
  for (const PolygonMesh& mesh : bench.candidates.meshes()) v.bench.candidates.add(mesh);
  for (const PolygonMesh& mesh : bench.index.meshes()) {
    if (moved.contains(mesh.mesh_id)) {
      v.bench.candidates.add(mesh);
    } else {
      v.bench.index.add(mesh);
    }
  }
  for (const auto& [c, x] : bench.truth.matches()) {
    if (!moved.contains(x)) v.bench.truth.add_match(c, x);
  }
  for (const PolygonMesh& mesh : v.bench.candidates.meshes()) {
    if (v.bench.truth.index_for(mesh.mesh_id) == nullptr) v.bench.truth.add_unmatched(mesh.mesh_id);
  }
  return v;
}

}  // namespace meshres
