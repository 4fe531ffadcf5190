#include "evsp/heuristics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <unordered_set>

#include "evsp/master.hpp"

namespace evsp {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void check_config(const HeuristicConfig& cfg,
                  const std::vector<Network>& nets) {
  if (cfg.theta < 0.5)
    throw EvspError("fixing threshold theta must be at least 0.5");
  if (nets.empty()) throw EvspError("no networks to price on");
}

bool integral_solution(const std::vector<double>& x) {
  for (double v : x) {
    double f = v - std::floor(v);
    if (std::min(f, 1.0 - f) > 1e-6) return false;
  }
  return true;
}

void append_log(HeuristicResult& res, const ColgenResult& cg) {
  for (ColgenIter it : cg.log.iters) {
    it.iter = static_cast<int>(res.log.iters.size());
    res.stats.pricing_sec_total += it.pricing_sec;
    res.stats.lp_sec_total += it.lp_sec;
    res.log.iters.push_back(it);
  }
  res.stats.colgen_iters += static_cast<int>(cg.log.iters.size());
  res.log.total_sec += cg.log.total_sec;
}

// Realize the selected columns and audit the result. Any dummy column in the
// selection shows up as uncovered trips and an infeasible verdict.
void finalize(HeuristicResult& res, const Instance& inst,
              const RmpState& state, const std::vector<int>& selected,
              const SocGrid& grid, const TimeBlocks& blocks) {
  std::vector<Column> chosen;
  for (int j : selected) {
    const PooledColumn& pc = state.pool[static_cast<std::size_t>(j)];
    if (!pc.dummy) chosen.push_back(pc.col);
  }
  res.schedule = realize(inst, chosen, grid, blocks);
  res.uncovered_trips = res.schedule.uncovered_trips;
  res.feasible = res.uncovered_trips.empty();
  res.objective = res.schedule.total_cost;
  if (res.feasible) {
    SimVerdict verdict = simulate(res.schedule, inst, grid, blocks);
    if (!verdict.feasible)
      throw EvspError("realized schedule failed its audit: " +
                      verdict.violations.front());
  }
}

} // namespace

HeuristicResult price_and_branch(const Instance& inst,
                                 std::vector<Network> nets,
                                 const HeuristicConfig& cfg) {
  check_config(cfg, nets);
  const auto t0 = std::chrono::steady_clock::now();
  HeuristicResult res;

  RmpState state = init_rmp(inst, nets);
  ColgenParams params = cfg.colgen;
  params.truncate = cfg.kind != HeuristicKind::PriceAndBranch;
  ColgenResult cg = run_colgen(state, nets, params);
  res.root_status = cg.status;
  append_log(res, cg);

  BipResult bip = solve_bip(state, cfg.bip_time_limit_sec);
  if (bip.selected.empty()) {
    res.feasible = false;
    for (const Trip& t : inst.trips) res.uncovered_trips.push_back(t.id);
  } else {
    finalize(res, inst, state, bip.selected, nets.front().grid,
             nets.front().blocks);
  }
  res.stats.total_sec = seconds_since(t0);
  return res;
}

HeuristicResult truncated_cg(const Instance& inst, std::vector<Network> nets,
                             const HeuristicConfig& cfg) {
  check_config(cfg, nets);
  const auto t0 = std::chrono::steady_clock::now();
  HeuristicResult res;

  RmpState state = init_rmp(inst, nets);
  ColgenParams params = cfg.colgen;
  params.truncate = true;
  const SocGrid grid = nets.front().grid;
  const TimeBlocks blocks = nets.front().blocks;
  const int n_trips = static_cast<int>(inst.trips.size());

  for (int phase = 0;; ++phase) {
    // Every phase fixes at least one new column covering a not yet fixed
    // trip, so the phase count is bounded by the trip count.
    if (phase > n_trips + 1)
      throw EvspError("diving did not converge; too many fixing phases");

    ColgenResult cg = run_colgen(state, nets, params);
    if (phase == 0) res.root_status = cg.status;
    append_log(res, cg);

    if (integral_solution(state.x)) break;

    std::vector<int> fixed = fix_columns(state, cfg.theta);
    if (fixed.empty()) {
      // Nothing safe to fix: finish the dive exactly instead.
      BipResult bip = solve_bip(state, cfg.bip_time_limit_sec);
      if (bip.selected.empty()) {
        res.feasible = false;
        for (const Trip& t : inst.trips) res.uncovered_trips.push_back(t.id);
      } else {
        finalize(res, inst, state, bip.selected, grid, blocks);
      }
      res.stats.total_sec = seconds_since(t0);
      return res;
    }
    res.stats.fixing_phases += 1;

    if (cfg.node_removal) {
      std::vector<bool> trips_gone(inst.trips.size(), false);
      std::vector<int> fixed_use(state.n_block_keys, 0);
      for (const PooledColumn& pc : state.pool) {
        if (!pc.fixed) continue;
        for (int t : pc.col.trips) trips_gone[static_cast<std::size_t>(t)] = true;
        for (int key : pc.col.use_keys) ++fixed_use[key];
      }
      std::unordered_set<int> saturated;
      for (int key = 0; key < state.n_block_keys; ++key) {
        int station = key / blocks.count;
        if (fixed_use[key] >= inst.stations[static_cast<std::size_t>(station)]
                                  .capacity)
          saturated.insert(key);
      }
      for (Network& net : nets) net = remove_nodes(net, trips_gone, saturated);
    }

    // Refresh the LP so the next phase prices duals that already respect the
    // new fixings.
    solve_lp(state);
  }

  std::vector<int> selected;
  for (std::size_t j = 0; j < state.x.size(); ++j)
    if (state.x[j] > 0.5) selected.push_back(static_cast<int>(j));
  finalize(res, inst, state, selected, grid, blocks);
  res.stats.total_sec = seconds_since(t0);
  return res;
}

HeuristicResult run_heuristic(const Instance& inst, std::vector<Network> nets,
                              const HeuristicConfig& cfg) {
  if (cfg.kind == HeuristicKind::TruncatedCG)
    return truncated_cg(inst, std::move(nets), cfg);
  return price_and_branch(inst, std::move(nets), cfg);
}

} // namespace evsp
