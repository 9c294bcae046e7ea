// Microbenchmarks for the hot filter paths: submask tests, tree search vs
// linear scan on synthetic corpora.

#include <benchmark/benchmark.h>

#include "qtr/balltree.hpp"
#include "qtr/bench.hpp"
#include "qtr/fingerprint.hpp"

namespace {

constexpr uint32_t kFl = 512;

qtr::Fingerprint sparse_query(const qtr::Fingerprint& base, int keep_every) {
  std::vector<uint64_t> words(base.words().begin(), base.words().end());
  int i = 0;
  for (auto& w : words)
    if (i++ % keep_every) w = 0;
  return qtr::Fingerprint(std::move(words), base.length());
}

void BM_IsSubmask(benchmark::State& state) {
  auto fps = qtr::random_fingerprints(2, kFl, 0.1, 7);
  auto q = sparse_query(fps[0], 2);
  for (auto _ : state) benchmark::DoNotOptimize(qtr::is_submask(q, fps[1]));
}
BENCHMARK(BM_IsSubmask);

void BM_LinearScan(benchmark::State& state) {
  auto fps = qtr::clustered_fingerprints(
      static_cast<std::size_t>(state.range(0)), kFl, 2, 8, 0.05, 42);
  auto q = sparse_query(fps[0], 4);
  for (auto _ : state)
    benchmark::DoNotOptimize(qtr::linear_scan(q, fps));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LinearScan)->Arg(10000)->Arg(100000);

void BM_TreeSearch(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  auto fps = qtr::clustered_fingerprints(n, kFl, 2, 8, 0.05, 42);
  std::vector<uint32_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<uint32_t>(i);
  auto tree = qtr::BallTree::build(std::move(ids), fps, qtr::BallTree::default_depth(n));
  auto q = sparse_query(fps[0], 4);
  for (auto _ : state)
    benchmark::DoNotOptimize(tree.find_supersets(q, fps));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TreeSearch)->Arg(10000)->Arg(100000);

void BM_TreeBuild(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  auto fps = qtr::random_fingerprints(n, kFl, 0.1, 42);
  for (auto _ : state) {
    std::vector<uint32_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<uint32_t>(i);
    benchmark::DoNotOptimize(
        qtr::BallTree::build(std::move(ids), fps, qtr::BallTree::default_depth(n)));
  }
}
BENCHMARK(BM_TreeBuild)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
