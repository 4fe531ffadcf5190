#pragma once

#include <vector>

#include "evsp/colgen.hpp"
#include "evsp/validator.hpp"

namespace evsp {

enum class HeuristicKind {
  PriceAndBranch,   // full column generation, then branch and bound
  TruncatedPnB,     // truncated column generation, then branch and bound
  TruncatedCG       // diving: truncated column generation + iterative fixing
};

struct HeuristicConfig {
  HeuristicKind kind = HeuristicKind::PriceAndBranch;
  double theta = 0.70;      // diving threshold; must stay >= 0.5
  bool node_removal = false; // shrink networks after each fixing round
  ColgenParams colgen;
  double bip_time_limit_sec = 3600.0;
};

struct HeuristicStats {
  double pricing_sec_total = 0.0;
  double lp_sec_total = 0.0;
  double total_sec = 0.0;
  int colgen_iters = 0;
  int fixing_phases = 0;
};

struct HeuristicResult {
  bool feasible = false;
  Schedule schedule;
  Cents objective = 0.0;
  ColgenLog log;          // concatenated over fixing phases
  ColgenStatus root_status = ColgenStatus::Optimal;
  HeuristicStats stats;
  std::vector<int> uncovered_trips; // non-empty only when infeasible
};

// Solve, validate internally, and return a ready schedule. Networks are
// taken by value: the diving variant mutates its working copies when node
// removal is on. Throws EvspError for invalid configuration (theta < 0.5).
HeuristicResult price_and_branch(const Instance& inst,
                                 std::vector<Network> nets,
                                 const HeuristicConfig& cfg);

HeuristicResult truncated_cg(const Instance& inst, std::vector<Network> nets,
                             const HeuristicConfig& cfg);

HeuristicResult run_heuristic(const Instance& inst, std::vector<Network> nets,
                              const HeuristicConfig& cfg);

} // namespace evsp
