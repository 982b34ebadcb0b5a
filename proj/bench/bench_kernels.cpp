// Serial vs OpenMP throughput for the hot kernels: the forward sweep, full
// coupling evaluation, and the replicate drivers behind the estimators.

#include <benchmark/benchmark.h>

#include "lpp/dynamics.hpp"
#include "lpp/estimators.hpp"
#include "lpp/lpp_core.hpp"

namespace {

void BM_forward_sweep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const lpp::Grid grid(n, 2);
  const auto dist = lpp::WeightDistribution::exponential(1.0);
  const lpp::Configuration cfg{
      &grid, lpp::sample_field(grid, dist, 7, lpp::rng::Tag::base_weights),
      false};
  for (auto _ : state) {
    benchmark::DoNotOptimize(lpp::passage_value(cfg));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(grid.vertex_count()));
}
BENCHMARK(BM_forward_sweep)->Arg(16)->Arg(64)->Arg(256);

void BM_full_passage(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const lpp::Grid grid(n, 2);
  const auto dist = lpp::WeightDistribution::exponential(1.0);
  const lpp::Configuration cfg{
      &grid, lpp::sample_field(grid, dist, 7, lpp::rng::Tag::base_weights),
      false};
  lpp::PassageResult result;
  for (auto _ : state) {
    lpp::passage_time_into(cfg, result);
    benchmark::DoNotOptimize(result.time);
  }
}
BENCHMARK(BM_full_passage)->Arg(16)->Arg(64)->Arg(256);

void BM_coupling_build(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const lpp::Grid grid(n, 2);
  const auto dist = lpp::WeightDistribution::exponential(1.0);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    lpp::DynamicCoupling coupling(grid, dist, ++seed);
    benchmark::DoNotOptimize(coupling.clocks().data());
  }
}
BENCHMARK(BM_coupling_build)->Arg(16)->Arg(64)->Arg(128);

template <bool Parallel>
void BM_passage_stats(benchmark::State& state) {
  const lpp::Grid grid(16, 2);
  const auto dist = lpp::WeightDistribution::exponential(1.0);
  lpp::ParallelOptions par;
  par.parallel = Parallel;
  for (auto _ : state) {
    const auto stats =
        lpp::estimate_passage_stats(grid, dist, 0.3, 2000, 11, par);
    benchmark::DoNotOptimize(stats.q_t.estimate);
  }
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_passage_stats<false>)->Unit(benchmark::kMillisecond)->Name("BM_passage_stats_serial");
BENCHMARK(BM_passage_stats<true>)->Unit(benchmark::kMillisecond)->Name("BM_passage_stats_parallel");

template <bool Parallel>
void BM_total_influence(benchmark::State& state) {
  const lpp::Grid grid(4, 2);
  const auto dist = lpp::WeightDistribution::exponential(1.0);
  lpp::ParallelOptions par;
  par.parallel = Parallel;
  for (auto _ : state) {
    const auto inf = lpp::total_influence(grid, dist, 0.2, 2000, 25, 3, par);
    benchmark::DoNotOptimize(inf.estimate);
  }
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_total_influence<false>)->Unit(benchmark::kMillisecond)->Name("BM_total_influence_serial");
BENCHMARK(BM_total_influence<true>)->Unit(benchmark::kMillisecond)->Name("BM_total_influence_parallel");

}  // namespace

BENCHMARK_MAIN();
