// Pricing throughput: one full sweep over all networks per iteration, with
// realistic dual magnitudes, across thread counts.

#include <benchmark/benchmark.h>

#include <random>

#include "evsp/generator.hpp"
#include "evsp/pricing.hpp"

using namespace evsp;

namespace {

struct Fixture {
  Instance inst;
  std::vector<Network> nets;
  DualVector duals;
  Fixture(int n_trips) {
    inst = generate_instance(7, n_trips, GeneratorProfile::paper());
    SocGrid grid = SocGrid::make(220, 1000, 30);
    TimeBlocks blocks =
        TimeBlocks::make(inst.horizon_start, inst.horizon_end, 5);
    nets = build_all_networks(inst, grid, blocks, RoundingMode::Conservative);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> sig(0.0, 2e6);
    std::uniform_real_distribution<double> gam(-1e5, 0.0);
    duals.sigma.resize(inst.trips.size());
    duals.gamma.resize(inst.stations.size() * blocks.count);
    for (double& s : duals.sigma) s = sig(rng);
    for (double& g : duals.gamma) g = gam(rng);
  }
};

void bm_price_all(benchmark::State& state) {
  Fixture fx(static_cast<int>(state.range(0)));
  PricingOptions opts;
  opts.threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    auto cols = price_all(fx.nets, fx.duals, 1e-6, opts);
    benchmark::DoNotOptimize(cols);
  }
}

} // namespace

BENCHMARK(bm_price_all)
    ->Args({100, 1})
    ->Args({100, 2})
    ->Args({100, 4})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
