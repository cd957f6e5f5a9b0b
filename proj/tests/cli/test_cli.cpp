#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <algorithm>
#include <fstream>
#include "json.hpp"

#include "support.hpp"

namespace {

namespace fs = std::filesystem;
using meshres::test::fixture;
using meshres::test::scratch_dir;
using meshres::test::slurp;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run(const fs::path& dir, const std::string& args) {
  const std::string cmd = "cd '" + dir.string() + "' && '" MESHRES_CLI "' " + args + " > stdout.txt 2> stderr.txt";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(dir / "stdout.txt");
  r.err = slurp(dir / "stderr.txt");
  return r;
}

std::size_t lines(const std::string& text) { return std::count(text.begin(), text.end(), '\n'); }

TEST(Cli, UsageErrorsExitWithOne) {
  const fs::path d = scratch_dir("cli_usage");
  EXPECT_EQ(run(d, "").code, 1);
  EXPECT_EQ(run(d, "frobnicate").code, 1);
  EXPECT_EQ(run(d, "block").code, 1);  // --run is required
  EXPECT_EQ(run(d, "gen-bench --out b -n notanumber").code, 1);
  EXPECT_EQ(run(d, "--help").code, 0);
}

TEST(Cli, DataErrorsExitWithTwo) {
  const fs::path d = scratch_dir("cli_data");
  const Result r = run(d, "report --run does-not-exist");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("error"), std::string::npos);
  std::ofstream(d / "bad.city.json") << "{\"CityObjects\": ";
  EXPECT_EQ(run(d, "featurize bad.city.json").code, 2);
  EXPECT_EQ(run(d, "contaminate --bench nowhere --out x --level 0.1").code, 2);
  EXPECT_EQ(run(d, "gen-bench --out b -n 10 --unmatched-fraction 1.5").code, 2);
}

TEST(Cli, FeaturizeBoxFixture) {
  const fs::path d = scratch_dir("cli_featurize");
  const Result r = run(d, "featurize '" + fixture("box.city.json").string() + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out), 2u);
  EXPECT_EQ(r.out.rfind("mesh_id,num_vertices,area,volume,", 0), 0u);
  EXPECT_NE(r.out.find("\nbox-1,8,52,24,4,"), std::string::npos);

  const Result sub = run(d, "featurize --properties volume,area --normalize -o p.csv '" +
                                fixture("box.city.json").string() + "'");
  ASSERT_EQ(sub.code, 0);
  EXPECT_EQ(slurp(d / "p.csv").substr(0, 20), "mesh_id,volume,area\n");
}

TEST(Cli, FeaturizeEmptyDatasetWarns) {
  const fs::path d = scratch_dir("cli_featurize_empty");
  const Result r = run(d, "featurize --min-polygons 10 '" + fixture("box.city.json").string() + "'");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out), 1u);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

// One small run shared by the tests below.
class CliRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = scratch_dir("cli_run");
    ASSERT_EQ(run(dir_, "gen-bench --out bench -n 600 --seed 5").code, 0);
    ASSERT_EQ(run(dir_, "train --bench bench --run run --seed 5").code, 0);
    ASSERT_EQ(run(dir_, "block --run run").code, 0);
    ASSERT_EQ(run(dir_, "match --run run").code, 0);
  }
  static fs::path dir_;
};

fs::path CliRun::dir_;

TEST_F(CliRun, ArtifactsAndManifest) {
  for (const char* f : {"config.json", "splits.json", "truth.csv", "candidates.csv", "predictions.csv",
                        "blocking_metrics.json", "matching_metrics.json", "matcher_model.json", "key.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "run" / f)) << f;
  }
  const auto manifest = nlohmann::json::parse(slurp(dir_ / "run" / "manifest.json"));
  EXPECT_EQ(manifest["format"], "meshres-run/1");
  for (const char* step : {"train", "block", "match"}) EXPECT_TRUE(manifest["steps"].contains(step)) << step;
  EXPECT_EQ(manifest["steps"]["train"]["config"]["pipeline"]["split"]["seed"], 5);
  const auto metrics = nlohmann::json::parse(slurp(dir_ / "run" / "matching_metrics.json"));
  EXPECT_GE(metrics["test"]["f1"].get<double>(), 85.0);
  EXPECT_TRUE(metrics["contaminated_test"].is_null());
}

TEST_F(CliRun, ReportCurves) {
  const Result r = run(dir_, "report --run run");
  ASSERT_EQ(r.code, 0) << r.err;
  const fs::path rep = dir_ / "run" / "report";
  EXPECT_EQ(lines(slurp(rep / "pc_rr.csv")), 1u + 5u);  // header plus k = 1..5
  std::ifstream eps(rep / "eps_delta.csv");
  std::string line, last_prop;
  double last_delta = 2.0;
  std::getline(eps, line);
  std::size_t rows = 0;
  while (std::getline(eps, line)) {
    const auto comma = line.find(',');
    const std::string name = line.substr(0, comma);
    const double delta = std::stod(line.substr(line.rfind(',') + 1));
    if (name == last_prop) EXPECT_LE(delta, last_delta) << line;
    last_prop = name;
    last_delta = delta;
    ++rows;
  }
  EXPECT_GT(rows, 20u);
  EXPECT_TRUE(fs::exists(rep / "pruning.csv"));
  EXPECT_TRUE(fs::exists(rep / "summary.txt"));
}

TEST_F(CliRun, EvalAndSweep) {
  const Result e = run(dir_, "eval --run run");
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_TRUE(fs::exists(dir_ / "run" / "eval.json"));
  const Result s = run(dir_, "sweep --run run --k-list 1,5,1000 --fb-list 1,3,20");
  ASSERT_EQ(s.code, 0) << s.err;
  const std::string csv = slurp(dir_ / "run" / "sweep.csv");
  EXPECT_EQ(lines(csv), 10u);
  EXPECT_EQ(csv.find("seconds"), std::string::npos);
  // fb 20 and k 1000 are clamped to the schema and index sizes
  const std::string last = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
  EXPECT_EQ(last.rfind("20,", 0), 0u) << last;
  EXPECT_NE(last.find(",100.000000,"), std::string::npos) << last;
}

TEST_F(CliRun, StandaloneModes) {
  const fs::path run_dir = dir_ / "run";
  Result r = run(dir_, "train --pairs run/matching_train_pairs.csv --model m.json --trees 10 --seed 3");
  ASSERT_EQ(r.code, 0) << r.err;
  r = run(dir_, "match --model m.json --pairs run/matching_test_pairs.csv -o preds.csv");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(slurp(dir_ / "preds.csv")), lines(slurp(run_dir / "matching_test_pairs.csv")));

  // a single-class pair file is refused
  std::ifstream in(run_dir / "matching_train_pairs.csv");
  std::ofstream out(dir_ / "positives.csv");
  std::string line;
  std::getline(in, line);
  out << line << '\n';
  while (std::getline(in, line)) {
    const std::size_t first = line.find(',');
    if (line.compare(line.find(',', first + 1), 3, ",1,") == 0) out << line << '\n';
  }
  out.close();
  EXPECT_EQ(run(dir_, "train --pairs positives.csv --model p.json").code, 2);

  // an empty candidate list scores to an empty prediction file
  const std::string pairs = slurp(run_dir / "matching_test_pairs.csv");
  std::ofstream(dir_ / "empty_pairs.csv") << pairs.substr(0, pairs.find('\n') + 1);
  r = run(dir_, "match --model m.json --pairs empty_pairs.csv -o empty_preds.csv");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir_ / "empty_preds.csv"), "candidate_id,index_id,probability,label\n");

  r = run(dir_, "eval --candidates run/candidates.csv --truth run/truth.csv --num-candidates 100 --num-index 600");
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST(Cli, ConfigFileWithFlagPrecedence) {
  const fs::path d = scratch_dir("cli_config");
  std::ofstream(d / "run.toml") << "[gen-bench]\nentities = 150\nseed = 9\n";
  ASSERT_EQ(run(d, "--config run.toml gen-bench --out a").code, 0);
  ASSERT_EQ(run(d, "--config run.toml gen-bench --out b --seed 10").code, 0);
  const auto ma = nlohmann::json::parse(slurp(d / "a" / "manifest.json"));
  const auto mb = nlohmann::json::parse(slurp(d / "b" / "manifest.json"));
  EXPECT_EQ(ma["generator"]["n_entities"], 150);
  EXPECT_EQ(ma["generator"]["seed"], 9);
  EXPECT_EQ(mb["generator"]["seed"], 10);
}

TEST(Cli, PerfectCloneBenchmark) {
  const fs::path d = scratch_dir("cli_clone");
  ASSERT_EQ(run(d, "gen-bench --out b -n 400 --seed 2 --footprint-sigma 0 --height-sigma 0 --extra-vertices 0 "
                   "--no-transform")
                .code,
            0);
  ASSERT_EQ(run(d, "train --bench b --run r --seed 2").code, 0);
  ASSERT_EQ(run(d, "block --run r").code, 0);
  ASSERT_EQ(run(d, "match --run r").code, 0);
  const auto m = nlohmann::json::parse(slurp(d / "r" / "matching_metrics.json"));
  EXPECT_EQ(m["test"]["f1"].get<double>(), 100.0);
  const auto b = nlohmann::json::parse(slurp(d / "r" / "blocking_metrics.json"));
  EXPECT_EQ(b["metrics"]["pc_at_k"]["1"].get<double>(), 100.0);
}

TEST(Cli, ContaminatedRunReportsBothF1s) {
  const fs::path d = scratch_dir("cli_contaminated");
  ASSERT_EQ(run(d, "gen-bench --out b -n 500 --seed 4 --height-rg 1.1").code, 0);
  ASSERT_EQ(run(d, "contaminate --bench b --out c --level 0.3 --seed 4").code, 0);
  EXPECT_TRUE(fs::exists(d / "c" / "contaminated.csv"));
  ASSERT_EQ(run(d, "train --bench c --run r --seed 4").code, 0);
  ASSERT_EQ(run(d, "block --run r").code, 0);
  const Result m = run(d, "match --run r");
  ASSERT_EQ(m.code, 0) << m.err;
  const auto j = nlohmann::json::parse(slurp(d / "r" / "matching_metrics.json"));
  EXPECT_TRUE(j["test"]["f1"].is_number());
  EXPECT_TRUE(j["contaminated_test"]["f1"].is_number());

  ASSERT_EQ(run(d, "contaminate --bench b --out dc --level 0.2 --mode dirty-clean").code, 0);
  EXPECT_EQ(lines(slurp(d / "dc" / "within_source.csv")), 1u + 80u);  // ceil(0.2 * 400)
  EXPECT_EQ(run(d, "contaminate --bench b --out x --level 0.2 --mode shuffle").code, 2);
}

// Identical seeds give byte-identical artifacts; only manifests differ.
TEST(Cli, DeterministicRuns) {
  const fs::path d = scratch_dir("cli_determinism");
  for (const char* tag : {"1", "2"}) {
    const std::string b = std::string("b") + tag, r = std::string("r") + tag;
    ASSERT_EQ(run(d, "gen-bench --out " + b + " -n 300 --seed 8").code, 0);
    ASSERT_EQ(run(d, "train --bench " + b + " --run " + r + " --seed 8").code, 0);
    ASSERT_EQ(run(d, "block --run " + r + " --prune-quantile 0.95").code, 0);
    ASSERT_EQ(run(d, "match --run " + r).code, 0);
  }
  std::size_t compared = 0;
  for (const char* pair : {"b", "r"}) {
    for (const auto& entry : fs::directory_iterator(d / (std::string(pair) + "1"))) {
      const std::string name = entry.path().filename().string();
      if (name == "manifest.json") continue;
      const fs::path twin = d / (std::string(pair) + "2") / name;
      ASSERT_TRUE(fs::exists(twin)) << name;
      EXPECT_EQ(slurp(entry.path()), slurp(twin)) << name;
      ++compared;
    }
  }
  EXPECT_GE(compared, 18u);
}

}  // namespace
