#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "meshres/bench.hpp"

namespace meshres::cli {

struct FeaturizeOptions {
  std::string input;
  std::string output;
  std::size_t min_polygons = 0;
  bool normalize = false;
  std::vector<std::string> properties;
};

struct GenBenchOptions {
  std::string out;
  GeneratorConfig generator;
  std::string index_mode = "containment";
  bool no_transform = false;
};

struct ContaminateOptions {
  std::string bench;
  std::string out;
  double level = 0.0;
  std::uint64_t seed = 42;
  std::string mode = "swap";
};

struct TrainOptions {
  std::string bench;
  std::string run;
  std::string pairs;  // pair-matrix mode
  std::string model;  // output model in pair-matrix mode
  std::uint64_t seed = 42;
  double train_ratio = 0.6;
  std::size_t negatives = 2;
  std::size_t hard_k = 3;
  std::size_t fb_size = 3;
  std::size_t k = 5;
  std::string criterion = "importance";
  std::string blocking_kind = "random_forest";
  std::string matcher_kind = "bagging";
  std::optional<std::size_t> n_trees;
  std::optional<std::size_t> max_depth;
  double threshold = 0.5;
  bool grid_search = false;
  std::string ratio_mode = "log_ratio";
  std::vector<std::string> properties;
};

struct BlockOptions {
  std::string run;
  std::optional<std::size_t> k;
  std::optional<std::size_t> fb_size;
  std::optional<std::string> criterion;
  std::optional<double> prune_quantile;
  bool no_prune = false;
};

struct MatchOptions {
  std::string run;
  std::string model;
  std::string pairs;
  std::string output;
  std::optional<double> threshold;
};

struct EvalOptions {
  std::string run;
  std::string candidates;
  std::string predictions;
  std::string truth;
  std::size_t num_candidates = 0;
  std::size_t num_index = 0;
};

struct SweepOptions {
  std::string run;
  std::vector<std::size_t> k_list{1, 3, 5, 10, 20};
  std::vector<std::size_t> fb_list{1, 2, 3, 5, 10, 20};
  std::optional<std::string> criterion;
};

struct ReportOptions {
  std::string run;
  double bin_width = 0.01;
};

int cmd_featurize(const FeaturizeOptions& o);
int cmd_gen_bench(const GenBenchOptions& o);
int cmd_contaminate(const ContaminateOptions& o);
int cmd_train(const TrainOptions& o);
int cmd_block(const BlockOptions& o);
int cmd_match(const MatchOptions& o);
int cmd_eval(const EvalOptions& o);
int cmd_sweep(const SweepOptions& o);
int cmd_report(const ReportOptions& o);

}  // namespace meshres::cli
