#pragma once

#include <optional>
#include <vector>

#include "evsp/common.hpp"
#include "evsp/instance.hpp"

namespace evsp {

// Two rounding policies drive the whole time/SoC expansion. Conservative
// rounds SoC down and pushes charging block starts later, so every expanded
// duty is realizable; it is used for producing schedules. Optimistic rounds
// SoC up and pulls block ends earlier, relaxing the problem; it is used for
// lower bounds.
enum class RoundingMode { Conservative, Optimistic };

// The SoC levels buses are allowed to occupy between activities:
// s_min, s_min + step, ..., plus s_full itself if the ladder misses it.
struct SocGrid {
  SocTenths s_min = 0;
  SocTenths s_full = kSocFull;
  SocTenths step = 0;
  std::vector<SocTenths> values; // ascending, values.front() == s_min

  static SocGrid make(SocTenths s_min, SocTenths s_full, SocTenths step);

  bool contains(SocTenths s) const;
};

// Charging time is partitioned into fixed-length blocks covering the horizon.
struct TimeBlocks {
  Minute length = 0;
  Minute start = 0; // == horizon start
  int count = 0;

  static TimeBlocks make(Minute horizon_start, Minute horizon_end,
                         Minute length);

  Minute block_start(int b) const { return start + b * length; }
  Minute block_end(int b) const { return start + (b + 1) * length; }
};

// Snap a continuous SoC (tenths) to the grid. Conservative takes the largest
// grid value <= raw, Optimistic the smallest >= raw; nullopt when raw falls
// outside the representable range on that side. Values within a hair of a
// grid point (floating point noise from energy arithmetic) snap onto it.
std::optional<SocTenths> round_soc(const SocGrid& grid, RoundingMode mode,
                                   double raw_tenths);

// First charging block usable after arriving at `arrival`. Conservative
// requires the block to start at or after arrival; Optimistic allows the
// block containing the arrival. nullopt when no such block exists.
std::optional<int> block_of_arrival(const TimeBlocks& blocks,
                                    RoundingMode mode, Minute arrival);

} // namespace evsp
