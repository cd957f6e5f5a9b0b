#include <benchmark/benchmark.h>

#include <random>

#include "meshres/kdtree.hpp"

namespace {

meshres::KdTree make_tree(std::size_t n, std::size_t dim, std::vector<double>& queries) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> coords(n * dim);
  for (double& c : coords) c = u(rng);
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = "p" + std::to_string(i);
  queries.resize(256 * dim);
  for (double& q : queries) q = u(rng);
  return meshres::KdTree(dim, std::move(coords), std::move(ids));
}

void BM_KdTreeBuild(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto dim = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    std::vector<double> q;
    benchmark::DoNotOptimize(make_tree(n, dim, q));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KdTreeBuild)->ArgsProduct({{1000, 10000, 100000}, {3}})->Complexity(benchmark::oNLogN);

void BM_KdTreeQuery(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto dim = static_cast<std::size_t>(state.range(1));
  const auto k = static_cast<std::size_t>(state.range(2));
  std::vector<double> queries;
  const meshres::KdTree tree = make_tree(n, dim, queries);
  std::size_t i = 0;
  for (auto _ : state) {
    const std::span<const double> q(queries.data() + (i++ % 256) * dim, dim);
    benchmark::DoNotOptimize(tree.knn(q, k));
  }
}
BENCHMARK(BM_KdTreeQuery)->ArgsProduct({{10000, 100000}, {1, 3, 5}, {1, 20}});

}  // namespace
