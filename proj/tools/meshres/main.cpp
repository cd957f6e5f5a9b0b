#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "meshres/error.hpp"

namespace {

using namespace meshres::cli;

void add_featurize(CLI::App& app, FeaturizeOptions& o, int& which) {
  auto* c = app.add_subcommand("featurize", "Compute geometric properties of a CityJSON or JSONL mesh file");
  c->add_option("--input,input", o.input, "CityJSON file or native *.jsonl")->required();
  c->add_option("-o,--output", o.output, "Property CSV (default: stdout)");
  c->add_option("--min-polygons", o.min_polygons, "Skip objects with fewer faces");
  c->add_flag("--normalize", o.normalize, "Apply log(1 + x) to every value");
  c->add_option("--properties", o.properties, "Property subset, in this order")->delimiter(',');
  c->callback([&which] { which = 1; });
}

void add_gen_bench(CLI::App& app, GenBenchOptions& o, int& which) {
  auto* c = app.add_subcommand("gen-bench", "Generate a synthetic benchmark bundle");
  auto& g = o.generator;
  c->add_option("--out", o.out, "Bundle directory")->required();
  c->add_option("-n,--entities", g.n_entities, "Number of candidate entities");
  c->add_option("--seed", g.seed);
  c->add_option("--footprint-rg", g.footprint.r_g, "Systematic footprint scale");
  c->add_option("--footprint-sigma", g.footprint.sigma, "Per-vertex footprint noise");
  c->add_option("--height-rg", g.height.r_g, "Systematic height scale");
  c->add_option("--height-sigma", g.height.sigma, "Per-entity height noise");
  c->add_option("--footprint-complexity", g.footprint_complexity, "Maximum outline vertices");
  c->add_option("--extra-vertices", g.extra_vertices, "Edges split in each matched candidate");
  c->add_option("--unmatched-fraction", g.unmatched_fraction);
  c->add_option("--extra-index", g.extra_index, "Distractor index objects");
  c->add_option("--index-mode", o.index_mode, "containment or disjoint");
  c->add_flag("--no-transform", o.no_transform, "Keep candidates in the index frame");
  c->callback([&which] { which = 2; });
}

void add_contaminate(CLI::App& app, ContaminateOptions& o, int& which) {
  auto* c = app.add_subcommand("contaminate", "Derive a contaminated copy of a bundle");
  c->add_option("--bench", o.bench, "Source bundle")->required();
  c->add_option("--out", o.out, "Output bundle")->required();
  c->add_option("--level", o.level, "Share of matched entities, in [0, 0.5]")->required();
  c->add_option("--seed", o.seed);
  c->add_option("--mode", o.mode, "swap or dirty-clean");
  c->callback([&which] { which = 3; });
}

void add_train(CLI::App& app, TrainOptions& o, int& which) {
  auto* c = app.add_subcommand("train", "Split a bundle and train the blocking model and matcher");
  c->add_option("--bench", o.bench, "Bundle directory");
  c->add_option("--run", o.run, "Run directory to create or update");
  c->add_option("--pairs", o.pairs, "Train only a matcher on this pair CSV");
  c->add_option("--model", o.model, "Model output with --pairs");
  c->add_option("--seed", o.seed);
  c->add_option("--train-ratio", o.train_ratio);
  c->add_option("--negatives", o.negatives, "Random negatives per positive for the blocking model");
  c->add_option("--hard-k", o.hard_k, "Hard negatives per candidate for the matcher");
  c->add_option("--fb,--fb-size", o.fb_size, "Blocking key size");
  c->add_option("-k,--k", o.k, "Neighbours per candidate");
  c->add_option("--criterion", o.criterion, "importance or std");
  c->add_option("--blocking-model", o.blocking_kind, "bagging, random_forest or gradient_boosting");
  c->add_option("--matcher", o.matcher_kind, "bagging, random_forest or gradient_boosting");
  c->add_option("--trees", o.n_trees);
  c->add_option("--depth", o.max_depth);
  c->add_option("--threshold", o.threshold, "Decision threshold");
  c->add_flag("--grid-search", o.grid_search, "Tune the matcher's depth and tree count");
  c->add_option("--ratio-mode", o.ratio_mode, "log_ratio or raw_ratio");
  c->add_option("--properties", o.properties)->delimiter(',');
  c->callback([&which] { which = 4; });
}

void add_block(CLI::App& app, BlockOptions& o, int& which) {
  auto* c = app.add_subcommand("block", "Generate candidate pairs for the test side of a run");
  c->add_option("--run", o.run)->required();
  c->add_option("-k,--k", o.k);
  c->add_option("--fb,--fb-size", o.fb_size);
  c->add_option("--criterion", o.criterion);
  c->add_option("--prune-quantile", o.prune_quantile);
  c->add_flag("--no-prune", o.no_prune);
  c->callback([&which] { which = 5; });
}

void add_match(CLI::App& app, MatchOptions& o, int& which) {
  auto* c = app.add_subcommand("match", "Score candidate pairs with the trained matcher");
  c->add_option("--run", o.run);
  c->add_option("--model", o.model);
  c->add_option("--pairs", o.pairs);
  c->add_option("-o,--output", o.output);
  c->add_option("--threshold", o.threshold);
  c->callback([&which] { which = 6; });
}

void add_eval(CLI::App& app, EvalOptions& o, int& which) {
  auto* c = app.add_subcommand("eval", "Blocking and matching metrics");
  c->add_option("--run", o.run);
  c->add_option("--candidates", o.candidates);
  c->add_option("--predictions", o.predictions);
  c->add_option("--truth", o.truth);
  c->add_option("--num-candidates", o.num_candidates);
  c->add_option("--num-index", o.num_index);
  c->callback([&which] { which = 7; });
}

void add_sweep(CLI::App& app, SweepOptions& o, int& which) {
  auto* c = app.add_subcommand("sweep", "PC and RR over a grid of key sizes and k");
  c->add_option("--run", o.run)->required();
  c->add_option("--k-list", o.k_list)->delimiter(',');
  c->add_option("--fb-list", o.fb_list)->delimiter(',');
  c->add_option("--criterion", o.criterion);
  c->callback([&which] { which = 8; });
}

void add_report(CLI::App& app, ReportOptions& o, int& which) {
  auto* c = app.add_subcommand("report", "Write curves and tables for a run");
  c->add_option("--run", o.run)->required();
  c->add_option("--bin-width", o.bin_width, "Ratio histogram bin width");
  c->callback([&which] { which = 9; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entity resolution of 3D building meshes"};
  app.set_config("--config", "", "TOML/INI file with option defaults");
  app.require_subcommand(1);

  FeaturizeOptions featurize;
  GenBenchOptions gen;
  ContaminateOptions contaminate;
  TrainOptions train;
  BlockOptions block;
  MatchOptions match;
  EvalOptions eval;
  SweepOptions sweep;
  ReportOptions report;
  int which = 0;
  add_featurize(app, featurize, which);
  add_gen_bench(app, gen, which);
  add_contaminate(app, contaminate, which);
  add_train(app, train, which);
  add_block(app, block, which);
  add_match(app, match, which);
  add_eval(app, eval, which);
  add_sweep(app, sweep, which);
  add_report(app, report, which);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    switch (which) {
      case 1: return cmd_featurize(featurize);
      case 2: return cmd_gen_bench(gen);
      case 3: return cmd_contaminate(contaminate);
      case 4: return cmd_train(train);
      case 5: return cmd_block(block);
      case 6: return cmd_match(match);
      case 7: return cmd_eval(eval);
      case 8: return cmd_sweep(sweep);
      case 9: return cmd_report(report);
      default: return 1;
    }
  } catch (const meshres::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const meshres::InvariantError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
}
