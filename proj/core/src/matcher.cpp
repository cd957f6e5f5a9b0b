#include "meshres/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "meshres/error.hpp"
#include "meshres/parallel.hpp"

namespace meshres {

namespace {

constexpr const char* kFormatTag = "meshres-matcher/1";

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void normalize_importance(std::vector<double>& v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  if (!(total > 0.0)) {
    std::fill(v.begin(), v.end(), 1.0 / static_cast<double>(v.size()));
    return;
  }
  for (double& x : v) x /= total;
}

struct TrainingData {
  FeatureMatrix x;
  std::vector<std::uint8_t> y;
};

TrainingData to_matrix(std::span<const PairFeatureVector> pairs, std::size_t width) {
  TrainingData d;
  d.x.rows = pairs.size();
  d.x.cols = width;
  d.x.data.reserve(pairs.size() * width);
  std::size_t positives = 0;
  for (const PairFeatureVector& p : pairs) {
    if (p.values.size() != width) {
      throw SchemaError("pair (" + p.candidate_id + ", " + p.index_id + ") has " +
                        std::to_string(p.values.size()) + " features, schema has " + std::to_string(width));
    }
    if (!p.label) throw Error("training pair (" + p.candidate_id + ", " + p.index_id + ") has no label");
    for (double v : p.values) {
      if (!std::isfinite(v)) throw Error("non-finite feature in pair (" + p.candidate_id + ", " + p.index_id + ")");
      d.x.data.push_back(v);
    }
    d.y.push_back(p.is_match() ? 1 : 0);
    positives += d.y.back();
  }
  if (positives == 0 || positives == pairs.size()) {
    throw Error("training set needs both matches and non-matches (got " + std::to_string(positives) + " of " +
                std::to_string(pairs.size()) + " positive)");
  }
  return d;
}

}  // namespace

std::string_view to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::bagging: return "bagging";
    case EnsembleKind::random_forest: return "random_forest";
    case EnsembleKind::gradient_boosting: return "gradient_boosting";
  }
  return "bagging";
}

EnsembleKind parse_ensemble_kind(std::string_view text) {
  if (text == "bagging") return EnsembleKind::bagging;
  if (text == "random_forest" || text == "forest") return EnsembleKind::random_forest;
  if (text == "gradient_boosting" || text == "boosting") return EnsembleKind::gradient_boosting;
  throw SchemaError("unknown ensemble kind '" + std::string(text) + "'");
}

MatcherConfig MatcherConfig::defaults(EnsembleKind kind) {
  MatcherConfig c;
  c.kind = kind;
  if (kind == EnsembleKind::gradient_boosting) c.max_depth = 3;
  return c;
}

double TrainedMatcher::probability(std::span<const double> features) const {
  if (features.size() != schema_.size()) {
    throw SchemaError("feature vector length " + std::to_string(features.size()) + " does not match model schema");
  }
  if (config_.kind == EnsembleKind::gradient_boosting) {
    double score = base_score_;
    for (const DecisionTree& t : trees_) score += config_.learning_rate * t.predict(features);
    return sigmoid(score);
  }
  double sum = 0.0;
  for (const DecisionTree& t : trees_) sum += t.predict(features);
  return sum / static_cast<double>(trees_.size());
}

void TrainedMatcher::check() const {
  if (trees_.empty()) throw InvariantError("matcher has no trees");
  if (importance_.size() != schema_.size()) throw InvariantError("importance length differs from schema");
  double total = 0.0;
  for (double v : importance_) {
    if (!(v >= 0.0)) throw InvariantError("negative feature importance");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvariantError("feature importance does not sum to 1");
  if (!(config_.decision_threshold > 0.0 && config_.decision_threshold < 1.0)) {
    throw InvariantError("decision threshold outside (0, 1)");
  }
  for (const DecisionTree& t : trees_) {
    t.check(schema_.size());
    if (config_.kind != EnsembleKind::gradient_boosting) {
      for (const TreeNode& n : t.nodes()) {
        if (n.is_leaf() && !(n.value >= 0.0 && n.value <= 1.0)) throw InvariantError("leaf probability outside [0, 1]");
      }
    }
  }
}

TrainedMatcher train_matcher(std::span<const PairFeatureVector> pairs, const PropertySchema& schema,
                             const MatcherConfig& config) {
  if (config.n_trees == 0) throw DomainError("matcher needs at least one tree");
  if (!(config.decision_threshold > 0.0 && config.decision_threshold < 1.0)) {
    throw DomainError("decision threshold must lie in (0, 1)");
  }
  if (!(config.learning_rate > 0.0)) throw DomainError("learning rate must be positive");
  const TrainingData data = to_matrix(pairs, schema.size());
  const std::size_t n = data.x.rows;
  const std::size_t d = data.x.cols;

  TrainedMatcher model;
  model.config_ = config;
  model.schema_ = schema;
  model.trees_.resize(config.n_trees);

  TreeParams params;
  params.max_depth = config.max_depth;
  params.min_leaf_weight = config.min_leaf_weight;

  if (config.kind == EnsembleKind::gradient_boosting) {
    const double pos = std::accumulate(data.y.begin(), data.y.end(), 0.0);
    const double p0 = pos / static_cast<double>(n);
    model.base_score_ = std::log(p0 / (1.0 - p0));
    std::vector<double> score(n, model.base_score_), grad(n), hess(n);
    std::vector<WeightedRow> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = {static_cast<std::uint32_t>(i), 1.0};
    std::vector<double> importance(d, 0.0);
    Rng rng(config.seed);
    for (std::size_t t = 0; t < config.n_trees; ++t) {
      for (std::size_t i = 0; i < n; ++i) {
        const double p = sigmoid(score[i]);
        grad[i] = p - data.y[i];
        hess[i] = std::max(p * (1.0 - p), 1e-12);
      }
      model.trees_[t] = fit_newton_tree(data.x, grad, hess, all, params, rng, importance);
      for (std::size_t i = 0; i < n; ++i) {
        score[i] += config.learning_rate * model.trees_[t].predict({data.x.row(i), d});
      }
    }
    normalize_importance(importance);
    model.importance_ = std::move(importance);
    return model;
  }

  if (config.kind == EnsembleKind::random_forest) {
    params.max_features = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));
  }
  std::vector<std::vector<double>> per_tree(config.n_trees);
  parallel_for(config.n_trees, [&](std::size_t t) {
    Rng rng(derive_seed(config.seed, t));
    std::vector<std::uint32_t> counts(n, 0);
    std::uniform_int_distribution<std::size_t> draw(0, n - 1);
    for (std::size_t i = 0; i < n; ++i) ++counts[draw(rng)];
    std::vector<WeightedRow> rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (counts[i] > 0) rows.push_back({static_cast<std::uint32_t>(i), static_cast<double>(counts[i])});
    }
    std::vector<double> importance(d, 0.0);
    model.trees_[t] = fit_gini_tree(data.x, data.y, std::move(rows), params, rng, importance);
    const double total = std::accumulate(importance.begin(), importance.end(), 0.0);
    if (total > 0.0) {
      for (double& v : importance) v /= total;
    }
    per_tree[t] = std::move(importance);
  });
  std::vector<double> importance(d, 0.0);
  for (const auto& tree_imp : per_tree) {
    for (std::size_t j = 0; j < d; ++j) importance[j] += tree_imp[j];
  }
  normalize_importance(importance);
  model.importance_ = std::move(importance);
  return model;
}

std::vector<Prediction> predict(const TrainedMatcher& model, std::span<const PairFeatureVector> pairs,
                                const PropertySchema& schema) {
  if (!(schema == model.schema())) throw SchemaError("pair schema does not match the model's schema");
  std::vector<Prediction> out(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const PairFeatureVector& p = pairs[i];
    Prediction& pred = out[i];
    pred.candidate_id = p.candidate_id;
    pred.index_id = p.index_id;
    pred.probability = model.probability(p.values);
    pred.label = pred.probability >= model.config().decision_threshold ? PairLabel::match : PairLabel::non_match;
  });
  return out;
}

std::vector<std::pair<std::string, double>> feature_importance(const TrainedMatcher& model) {
  std::vector<std::size_t> order(model.importance().size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return model.importance()[a] > model.importance()[b]; });
  std::vector<std::pair<std::string, double>> ranked;
  for (std::size_t i : order) ranked.emplace_back(std::string(model.schema().name(i)), model.importance()[i]);
  return ranked;
}

std::string TrainedMatcher::to_json() const {
  nlohmann::ordered_json doc;
  doc["format"] = kFormatTag;
  doc["schema"] = schema_.names();
  doc["ensemble_kind"] = std::string(to_string(config_.kind));
  doc["hyperparameters"] = {{"n_trees", config_.n_trees},
                            {"max_depth", config_.max_depth},
                            {"min_leaf_weight", config_.min_leaf_weight},
                            {"learning_rate", config_.learning_rate}};
  doc["decision_threshold"] = config_.decision_threshold;
  doc["seed"] = config_.seed;
  doc["base_score"] = base_score_;
  doc["importance"] = importance_;
  auto trees = nlohmann::ordered_json::array();
  for (const DecisionTree& t : trees_) {
    auto nodes = nlohmann::ordered_json::array();
    for (const TreeNode& n : t.nodes()) {
      if (n.is_leaf()) {
        nodes.push_back({{"value", n.value}});
      } else {
        nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right}});
      }
    }
    trees.push_back({{"max_depth", t.max_depth()}, {"nodes", std::move(nodes)}});
  }
  doc["trees"] = std::move(trees);
  return doc.dump() + "\n";
}

TrainedMatcher TrainedMatcher::from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what(), e.byte);
  }
  try {
    if (doc.at("format").get<std::string>() != kFormatTag) {
      throw SchemaError("unsupported model format '" + doc.at("format").get<std::string>() + "'");
    }
    TrainedMatcher m;
    const auto names = doc.at("schema").get<std::vector<std::string>>();
    m.schema_ = PropertySchema::from_names(names);
    m.config_.kind = parse_ensemble_kind(doc.at("ensemble_kind").get<std::string>());
    const auto& hp = doc.at("hyperparameters");
    m.config_.n_trees = hp.at("n_trees").get<std::size_t>();
    m.config_.max_depth = hp.at("max_depth").get<std::size_t>();
    m.config_.min_leaf_weight = hp.at("min_leaf_weight").get<double>();
    m.config_.learning_rate = hp.at("learning_rate").get<double>();
    m.config_.decision_threshold = doc.at("decision_threshold").get<double>();
    m.config_.seed = doc.at("seed").get<std::uint64_t>();
    m.base_score_ = doc.at("base_score").get<double>();
    m.importance_ = doc.at("importance").get<std::vector<double>>();
    for (const auto& jt : doc.at("trees")) {
      std::vector<TreeNode> nodes;
      for (const auto& jn : jt.at("nodes")) {
        TreeNode n;
        if (jn.contains("value")) {
          n.value = jn.at("value").get<double>();
        } else {
          n.feature = jn.at("feature").get<std::int32_t>();
          n.threshold = jn.at("threshold").get<double>();
          n.left = jn.at("left").get<std::int32_t>();
          n.right = jn.at("right").get<std::int32_t>();
        }
        nodes.push_back(n);
      }
      m.trees_.emplace_back(std::move(nodes), jt.at("max_depth").get<std::size_t>());
    }
    try {
      m.check();
    } catch (const InvariantError& e) {
      throw SchemaError(std::string("corrupt model: ") + e.what());
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed model document: ") + e.what());
  }
}

void TrainedMatcher::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << to_json();
}

TrainedMatcher TrainedMatcher::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

double cross_validated_accuracy(std::span<const PairFeatureVector> pairs, const PropertySchema& schema,
                                const MatcherConfig& config, std::size_t folds) {
  if (folds < 2 || pairs.size() < folds) throw DomainError("cross-validation needs 2 <= folds <= rows");
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(config.seed, 0xcf));
  std::shuffle(order.begin(), order.end(), rng);

  std::size_t correct = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<PairFeatureVector> train, test;
    for (std::size_t i = 0; i < order.size(); ++i) {
      (i % folds == f ? test : train).push_back(pairs[order[i]]);
    }
    const TrainedMatcher model = train_matcher(train, schema, config);
    const std::vector<Prediction> preds = predict(model, test, schema);
    for (std::size_t i = 0; i < preds.size(); ++i) {
      if ((preds[i].label == PairLabel::match) == test[i].is_match()) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

MatcherConfig grid_search(std::span<const PairFeatureVector> pairs, const PropertySchema& schema,
                          const MatcherConfig& base, std::size_t folds, std::vector<GridPoint>* trace) {
  MatcherConfig best = base;
  double best_accuracy = -1.0;
  for (std::size_t depth : {4, 8, 12}) {
    for (std::size_t trees : {50, 100}) {
      MatcherConfig c = base;
      c.max_depth = depth;
      c.n_trees = trees;
      const double acc = cross_validated_accuracy(pairs, schema, c, folds);
      if (trace != nullptr) trace->push_back({depth, trees, acc});
      if (acc > best_accuracy) {
        best_accuracy = acc;
        best = c;
      }
    }
  }
  return best;
}

}  // namespace meshres
