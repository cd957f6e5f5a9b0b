#include <benchmark/benchmark.h>

#include "meshres/bench.hpp"
#include "meshres/properties.hpp"

namespace {

meshres::Benchmark corpus(std::size_t n, std::size_t complexity) {
  meshres::GeneratorConfig g;
  g.n_entities = n;
  g.seed = 3;
  g.footprint_complexity = complexity;
  return meshres::generate_benchmark(g);
}

void BM_ComputeProperties(benchmark::State& state) {
  const meshres::Benchmark b = corpus(64, static_cast<std::size_t>(state.range(0)));
  const meshres::PropertySchema schema = meshres::PropertySchema::full();
  const auto& meshes = b.index.meshes();
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(meshres::compute_properties(meshes[i++ % meshes.size()], schema));
}
BENCHMARK(BM_ComputeProperties)->Arg(6)->Arg(12)->Arg(48);

// Whole-dataset featurization, to see how it scales with the mesh count.
void BM_Featurize(benchmark::State& state) {
  const meshres::Benchmark b = corpus(static_cast<std::size_t>(state.range(0)), 12);
  const meshres::PropertySchema schema = meshres::PropertySchema::full();
  for (auto _ : state) benchmark::DoNotOptimize(meshres::featurize(b.index, schema, true));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(b.index.size()));
}
BENCHMARK(BM_Featurize)->Arg(250)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace
