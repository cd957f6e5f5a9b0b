#include <benchmark/benchmark.h>

#include <random>

#include "meshres/matcher.hpp"

namespace {

std::vector<meshres::PairFeatureVector> pairs(std::size_t n) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> match(1.0, 0.05), other(1.0, 0.4);
  std::vector<meshres::PairFeatureVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    const bool m = i % 5 == 0;
    std::vector<double> v(meshres::kPropertyCount);
    for (double& x : v) x = m ? match(rng) : other(rng);
    out.push_back({"c" + std::to_string(i), "i" + std::to_string(i), std::move(v),
                   m ? meshres::PairLabel::match : meshres::PairLabel::non_match});
  }
  return out;
}

void BM_TrainMatcher(benchmark::State& state) {
  const auto kind = static_cast<meshres::EnsembleKind>(state.range(1));
  const auto data = pairs(static_cast<std::size_t>(state.range(0)));
  meshres::MatcherConfig c = meshres::MatcherConfig::defaults(kind);
  c.n_trees = 50;
  for (auto _ : state) benchmark::DoNotOptimize(meshres::train_matcher(data, meshres::PropertySchema::full(), c));
  state.SetLabel(std::string(meshres::to_string(kind)));
}
BENCHMARK(BM_TrainMatcher)->ArgsProduct({{1000, 4000}, {0, 1, 2}})->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
  const auto data = pairs(4000);
  meshres::MatcherConfig c = meshres::MatcherConfig::defaults(meshres::EnsembleKind::random_forest);
  c.n_trees = 100;
  const auto model = meshres::train_matcher(data, meshres::PropertySchema::full(), c);
  for (auto _ : state) benchmark::DoNotOptimize(meshres::predict(model, data, model.schema()));
  state.SetItemsProcessed(state.iterations() * 4000);
}
BENCHMARK(BM_Predict)->Unit(benchmark::kMillisecond);

}  // namespace
