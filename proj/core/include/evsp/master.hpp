#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include "evsp/pricing.hpp"
#include "evsp/simplex.hpp"

namespace evsp {

struct PooledColumn {
  Column col;
  bool initial = false; // part of the singleton start pool
  bool dummy = false;
  bool fixed = false;   // lower bound pinned to 1 by the diving heuristic
};

// Restricted master: set covering over the pooled columns plus per
// (station, block) capacity rows. Covering rows are >= 1; capacity rows
// <= M_r exist only for keys that survive in some pruned network. Columns
// get upper bound +inf: with strictly positive costs the LP never benefits
// from pushing any x above 1, so the relaxation value is unaffected and the
// basis stays smaller.
struct RmpState {
  const Instance* inst = nullptr;
  int n_block_keys = 0; // station count * block count
  std::vector<PooledColumn> pool;
  LpProblem lp;
  SimplexSolver solver;
  // gamma row per key, -1 when the key has no row (never usable).
  std::vector<int> gamma_row;
  std::vector<double> x;     // last LP primal, per pooled column
  DualVector duals;          // last LP duals
  Cents z_rmp = 0.0;
  bool dummy_active = false; // some dummy has x > tolerance in the last LP
  // Exact duplicate guard for the pool (same k, trips, uses, cost).
  std::unordered_set<std::string> signatures;

  int n_trips() const { return static_cast<int>(inst->trips.size()); }
};

// Start pool: the cheapest single-trip duty per trip over all combinations
// (found by pricing each trip alone, so it may include charging) plus one
// dummy per trip as a feasibility backstop. Solves the initial LP.
RmpState init_rmp(const Instance& inst, const std::vector<Network>& nets);

// Append priced columns to the pool and the LP (deduplicated against the
// pool by exact trip/use/cost signature). Returns how many were new.
int add_columns(RmpState& state, const std::vector<PricedColumn>& cols);

// Re-solve the LP, refresh x/duals/z_rmp/dummy_active, and verify the
// optimality certificate. Throws EvspError if the solver fails or the
// certificate does not hold.
void solve_lp(RmpState& state);

// Diving step: permanently fix to 1 every non-dummy, non-initial column with
// x > theta, or the single largest such x when none clears theta. Skips (and
// warns about) candidates whose fixing would overrun a capacity row given
// what is already fixed. Returns indices of newly fixed columns; empty means
// the caller should fall back to branch and bound.
std::vector<int> fix_columns(RmpState& state, double theta);

struct BipResult {
  bool feasible = false;
  Cents objective = 0.0;
  Cents bound = 0.0; // best LP bound seen; == objective when proven optimal
  std::vector<int> selected; // pooled column indices with x = 1
  bool proven_optimal = false;
};

// Branch and bound over the current pool (no new columns), branching on the
// most fractional variable, depth first with the x = 1 child first. Respects
// fixed columns. Stops at the time limit and reports the incumbent.
BipResult solve_bip(RmpState& state, double time_limit_sec);

} // namespace evsp
