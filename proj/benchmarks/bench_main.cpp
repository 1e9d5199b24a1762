#include <benchmark/benchmark.h>

#include <vector>

#include "uwb/montecarlo.hpp"
#include "uwb/scenario.hpp"
#include "uwb/solver.hpp"

using namespace uwb;

namespace {

void BM_Solve(benchmark::State& state) {
  const Scenario s = default_room(1);
  ProtocolSimulator sim(s);
  const TagState tag{{3, 2.5}, {0, 0}, s.tag_clock};
  const auto meas = sim.measure(sim.receive(sim.broadcast(0), tag, 0, 0), 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve(meas, s.geometry, std::nullopt, s.solver));
  }
}
BENCHMARK(BM_Solve);

void BM_ProtocolCycle(benchmark::State& state) {
  const Scenario s = default_room(1);
  ProtocolSimulator sim(s);
  const TagState tag{{3, 2.5}, {0, 0}, s.tag_clock};
  std::int64_t cycle = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim.locate(tag, 0, cycle++));
  }
}
BENCHMARK(BM_ProtocolCycle);

// Tags share one broadcast; only reception and solving scale with the count.
void BM_CycleForTags(benchmark::State& state) {
  const Scenario s = default_room(1);
  const std::vector<std::size_t> counts{static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(run_scalability(s, counts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CycleForTags)->Arg(1)->Arg(10)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& state) {
  McConfig cfg;
  cfg.anchors = 10;
  cfg.trials = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_mc_all(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 10);
}
BENCHMARK(BM_MonteCarlo)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_PdopMap(benchmark::State& state) {
  const Scenario s = default_room(1);
  for (auto _ : state) benchmark::DoNotOptimize(pdop_map(s.geometry, {0, 10, 0, 8}, 0.1));
}
BENCHMARK(BM_PdopMap)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
