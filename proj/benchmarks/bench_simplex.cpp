// LP engine: cold solves on random covering problems, and the warm resolve
// after appending columns that column generation leans on.

#include <benchmark/benchmark.h>

#include <algorithm>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "evsp/simplex.hpp"

using namespace evsp;

namespace {

// Random set-covering-shaped LP: >= 1 rows, sparse 0/1 columns with positive
// costs, plus one expensive backstop column per row so the problem is always
// feasible and bounded.
LpProblem random_covering(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> cost(100.0, 5000.0);
  std::uniform_int_distribution<int> pick(0, rows - 1);
  LpProblem p;
  for (int i = 0; i < rows; ++i) p.add_row(RowSense::Ge, 1.0);
  for (int j = 0; j < cols; ++j) {
    std::vector<int> idx;
    int nz = 1 + static_cast<int>(rng() % 4);
    for (int t = 0; t < nz; ++t) idx.push_back(pick(rng));
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    std::vector<std::pair<int, double>> entries;
    for (int i : idx) entries.emplace_back(i, 1.0);
    p.add_column(cost(rng) * static_cast<double>(idx.size()), 0.0,
                 std::numeric_limits<double>::infinity(), std::move(entries));
  }
  for (int i = 0; i < rows; ++i)
    p.add_column(1e7, 0.0, std::numeric_limits<double>::infinity(),
                 {{i, 1.0}});
  return p;
}

void bm_cold_solve(benchmark::State& state) {
  LpProblem p = random_covering(static_cast<int>(state.range(0)),
                                static_cast<int>(state.range(1)), 42);
  for (auto _ : state) {
    SimplexSolver solver;
    LpSolution sol = solver.solve(p);
    benchmark::DoNotOptimize(sol);
  }
}

void bm_warm_columns(benchmark::State& state) {
  int rows = static_cast<int>(state.range(0));
  LpProblem base = random_covering(rows, 4 * rows, 42);
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> cost(100.0, 5000.0);
  std::uniform_int_distribution<int> pick(0, rows - 1);
  for (auto _ : state) {
    state.PauseTiming();
    LpProblem grown = base;
    SimplexSolver solver;
    solver.solve(grown);
    // Twenty freshly priced columns, like one colgen iteration.
    for (int j = 0; j < 20; ++j) {
      int a = pick(rng), b = pick(rng);
      if (a > b) std::swap(a, b);
      std::vector<std::pair<int, double>> entries{{a, 1.0}};
      if (b != a) entries.emplace_back(b, 1.0);
      grown.add_column(cost(rng), 0.0,
                       std::numeric_limits<double>::infinity(),
                       std::move(entries));
    }
    state.ResumeTiming();
    LpSolution sol = solver.resolve(grown);
    benchmark::DoNotOptimize(sol);
  }
}

} // namespace

BENCHMARK(bm_cold_solve)
    ->Args({50, 400})
    ->Args({150, 1200})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(bm_warm_columns)->Arg(50)->Arg(150)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
