// How expensive is building the time/SoC expanded networks, and how much do
// the trip count, the grid step, and node removal move the needle.

#include <benchmark/benchmark.h>

#include <unordered_set>

#include "evsp/generator.hpp"
#include "evsp/network.hpp"

using namespace evsp;

namespace {

Instance instance_with(int n_trips) {
  return generate_instance(7, n_trips, GeneratorProfile::paper());
}

void bm_build(benchmark::State& state) {
  Instance inst = instance_with(static_cast<int>(state.range(0)));
  SocGrid grid = SocGrid::make(220, 1000, static_cast<SocTenths>(state.range(1)));
  TimeBlocks blocks = TimeBlocks::make(inst.horizon_start, inst.horizon_end, 5);
  std::int64_t arcs = 0;
  for (auto _ : state) {
    auto nets = build_all_networks(inst, grid, blocks, RoundingMode::Conservative);
    arcs = 0;
    for (const Network& n : nets) arcs += static_cast<std::int64_t>(n.arcs.size());
    benchmark::DoNotOptimize(nets);
  }
  state.counters["arcs"] = static_cast<double>(arcs);
}

void bm_remove_nodes(benchmark::State& state) {
  Instance inst = instance_with(static_cast<int>(state.range(0)));
  SocGrid grid = SocGrid::make(220, 1000, 30);
  TimeBlocks blocks = TimeBlocks::make(inst.horizon_start, inst.horizon_end, 5);
  auto nets = build_all_networks(inst, grid, blocks, RoundingMode::Conservative);
  // Knock out every third trip, as a fixing round would.
  std::vector<bool> gone(inst.trips.size(), false);
  for (std::size_t i = 0; i < gone.size(); i += 3) gone[i] = true;
  std::unordered_set<int> saturated;
  for (auto _ : state) {
    Network smaller = remove_nodes(nets[0], gone, saturated);
    benchmark::DoNotOptimize(smaller);
  }
}

} // namespace

BENCHMARK(bm_build)
    ->Args({30, 30})
    ->Args({30, 60})
    ->Args({100, 30})
    ->Args({100, 60})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(bm_remove_nodes)->Arg(30)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
