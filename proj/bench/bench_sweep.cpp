#include <benchmark/benchmark.h>

#include "gatesim/envelope.hpp"

namespace {

gatesim::SweepPlan bench_plan() {
  gatesim::SweepPlan p;
  p.speed = {0.5, 1.9, 4};
  p.angle = {0.0, gatesim::deg_to_rad(45.0), 5};
  p.trials_per_cell = 4;
  return p;
}

void BM_SweepSerial(benchmark::State& state) {
  const auto plan = bench_plan();
  for (auto _ : state)
    benchmark::DoNotOptimize(gatesim::run_sweep_serial(plan, {}, {}, gatesim::GateMode::Passive));
  state.SetItemsProcessed(state.iterations() * gatesim::cell_count(plan) * plan.trials_per_cell);
}

void BM_SweepParallel(benchmark::State& state) {
  const auto plan = bench_plan();
  for (auto _ : state)
    benchmark::DoNotOptimize(gatesim::run_sweep(plan, {}, {}, gatesim::GateMode::Passive));
  state.SetItemsProcessed(state.iterations() * gatesim::cell_count(plan) * plan.trials_per_cell);
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
