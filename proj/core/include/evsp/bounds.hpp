#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evsp/colgen.hpp"

namespace evsp {

struct LowerBoundResult {
  Cents value = 0.0;
  bool truncated = false; // stopped on a time cap; value is still valid
  ColgenLog log;
};

// True lower bound on the continuous-SoC optimum: column generation to
// optimality on optimistically rounded networks. When the time cap bites,
// the best Lagrangian bound seen so far is returned instead.
LowerBoundResult true_lower_bound(const Instance& inst, const SocGrid& grid,
                                  const TimeBlocks& blocks,
                                  const ColgenParams& params);

// Relative gap in percent: 100 * (solution - lower_bound) / lower_bound.
// Throws EvspError when lower_bound <= 0.
double gap(Cents solution, Cents lower_bound);

// Exhaustive reference computations for small instances, used to cross-check
// the solver stack. NetworkPaths enumerates every source-sink path of the
// built networks and solves the resulting covering problem exactly.
// ContinuousDuties enumerates duties under the same movement rules but with
// exact (unrounded) SoC and is the yardstick for rounding-induced loss.
enum class OracleMode { NetworkPaths, ContinuousDuties };

struct OracleCaps {
  int max_trips = 8;
  std::int64_t max_steps = 4'000'000;
};

struct OracleResult {
  bool refused = false;
  std::string refusal_reason;
  Cents lp_value = 0.0;
  Cents ip_value = 0.0;
  std::int64_t n_columns = 0;
  std::vector<Column> columns; // deduplicated enumerated duties
};

OracleResult oracle_solve(const Instance& inst, OracleMode mode,
                          const SocGrid& grid, const TimeBlocks& blocks,
                          RoundingMode rounding, const OracleCaps& caps);

} // namespace evsp
