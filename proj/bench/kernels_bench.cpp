// Serial reference vs OpenMP kernels. The second argument selects the
// variant: 0 serial, 1 parallel.

#include <benchmark/benchmark.h>

#include <memory>

#include "rfim/glauber.hpp"
#include "rfim/kernels.hpp"
#include "rfim/oracle.hpp"
#include "rfim/rng.hpp"

namespace {

using namespace rfim;

Exec exec_of(const benchmark::State& s) { return s.range(1) ? Exec::parallel : Exec::serial; }

IsingModel grid_model(int rows, int cols) {
  auto g = std::make_shared<const Graph>(gen::grid(rows, cols));
  return IsingModel(g, 0.4, sample_field(FieldDistribution::uniform_symmetric(1.0), g->num_vertices(), 1).values);
}

void BM_LogWeights(benchmark::State& s) {
  const IsingModel m = grid_model(4, static_cast<int>(s.range(0)) / 4);
  const auto free = m.free_vertices();
  for (auto _ : s) benchmark::DoNotOptimize(log_weights(m, free, exec_of(s)));
  s.SetItemsProcessed(s.iterations() * (std::int64_t{1} << free.size()));
}
BENCHMARK(BM_LogWeights)->ArgsProduct({{16, 20}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Histogram(benchmark::State& s) {
  const CounterRng rng(3, 1);
  const auto count = static_cast<std::uint64_t>(s.range(0));
  for (auto _ : s) {
    benchmark::DoNotOptimize(histogram(
        count, 64, [&](std::uint64_t i) { return static_cast<std::size_t>(scale_below(rng.block(i)[0], 64)); },
        exec_of(s)));
  }
  s.SetItemsProcessed(s.iterations() * s.range(0));
}
BENCHMARK(BM_Histogram)->ArgsProduct({{1 << 20}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_ReplicaHistogram(benchmark::State& s) {
  const IsingModel m = grid_model(3, 3);
  for (auto _ : s)
    benchmark::DoNotOptimize(replica_histogram(m, m.constant_configuration(false), 200, s.range(0), 5, exec_of(s)));
  s.SetItemsProcessed(s.iterations() * s.range(0) * 200);
}
BENCHMARK(BM_ReplicaHistogram)->ArgsProduct({{20000}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Cor2Sweep(benchmark::State& s) {
  auto g = std::make_shared<const Graph>(gen::path(static_cast<int>(s.range(0))));
  const IsingModel m = to_zero_one(IsingModel(g, 0.4, std::vector<double>(static_cast<std::size_t>(g->num_vertices()), 0.1)));
  for (auto _ : s) benchmark::DoNotOptimize(sup_cor2_over_pinnings(m, {0.0, 0.5}, exec_of(s)));
}
BENCHMARK(BM_Cor2Sweep)->ArgsProduct({{6}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_GaltonWatson(benchmark::State& s) {
  for (auto _ : s)
    benchmark::DoNotOptimize(gw_total_progeny_histogram(3, 0.1, 2, static_cast<std::uint64_t>(s.range(0)), 60, 7, exec_of(s)));
  s.SetItemsProcessed(s.iterations() * s.range(0));
}
BENCHMARK(BM_GaltonWatson)->ArgsProduct({{200000}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
