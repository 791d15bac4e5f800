#include <benchmark/benchmark.h>

#include "trustsched/experiments.hpp"
#include "trustsched/incentive.hpp"
#include "trustsched/simulator.hpp"
#include "trustsched/soap.hpp"

using namespace trustsched;

static void BM_ResponseTable(benchmark::State& state) {
  const auto config = find_preset("fig-1").family().at(0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(response_table(config, TrustKind::MeasuredTrust, 0.5));
  }
}
BENCHMARK(BM_ResponseTable);

static void BM_IcRegion(benchmark::State& state) {
  const auto config = preset_example_3_1();
  const auto kind = state.range(0) == 0 ? TrustKind::MeasuredTrust : TrustKind::BlindTrust;
  for (auto _ : state) benchmark::DoNotOptimize(ic_region(config, kind));
}
BENCHMARK(BM_IcRegion)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

static void BM_SweepRow(benchmark::State& state) {
  const auto config = find_preset("fig-1").family().at(0.2);
  for (auto _ : state) {
    for (int m = 0; m <= 1000; ++m) {
      const double b = m * 1e-3;
      benchmark::DoNotOptimize(ic_check(config, TrustKind::MeasuredTrust, b).compatible);
      benchmark::DoNotOptimize(ic_check(config, TrustKind::BlindTrust, b).compatible);
    }
  }
}
BENCHMARK(BM_SweepRow)->Unit(benchmark::kMillisecond);

static void BM_Simulate(benchmark::State& state) {
  const auto config = preset_example_3_1();
  SimConfig sim;
  sim.job_count = static_cast<std::uint64_t>(state.range(0));
  sim.replications = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        simulate(config, PolicySpec::make(PolicyKind::MeasuredTrust, 0.43), sim));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(100'000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
