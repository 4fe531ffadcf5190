#include "evsp/discretization.hpp"

#include <algorithm>
#include <cmath>

namespace evsp {

namespace {
// Energy bookkeeping multiplies small rationals, so values that should land
// exactly on a grid point can miss it by a few ulps. Anything this close to
// a grid point counts as on it.
constexpr double kSnapEps = 1e-9;
} // namespace

SocGrid SocGrid::make(SocTenths s_min, SocTenths s_full, SocTenths step) {
  if (step <= 0) throw EvspError("SoC grid step must be positive");
  if (s_min < 0 || s_full <= s_min)
    throw EvspError("SoC grid needs 0 <= s_min < s_full");
  SocGrid g;
  g.s_min = s_min;
  g.s_full = s_full;
  g.step = step;
  for (SocTenths s = s_min; s <= s_full; s += step) g.values.push_back(s);
  // The ladder may overshoot s_full's remainder; always keep s_full itself
  // so full batteries are representable.
  if (g.values.back() != s_full) g.values.push_back(s_full);
  return g;
}

bool SocGrid::contains(SocTenths s) const {
  return std::binary_search(values.begin(), values.end(), s);
}

TimeBlocks TimeBlocks::make(Minute horizon_start, Minute horizon_end,
                            Minute length) {
  if (length <= 0) throw EvspError("time block length must be positive");
  if (horizon_end < horizon_start)
    throw EvspError("horizon ends before it starts");
  TimeBlocks tb;
  tb.length = length;
  tb.start = horizon_start;
  tb.count = (horizon_end - horizon_start + length - 1) / length;
  return tb;
}

std::optional<SocTenths> round_soc(const SocGrid& grid, RoundingMode mode,
                                   double raw_tenths) {
  const auto& v = grid.values;
  if (mode == RoundingMode::Conservative) {
    // Largest grid value <= raw.
    if (raw_tenths < v.front() - kSnapEps) return std::nullopt;
    auto it = std::upper_bound(v.begin(), v.end(), raw_tenths + kSnapEps);
    return *(it - 1);
  }
  // Optimistic: smallest grid value >= raw.
  if (raw_tenths > v.back() + kSnapEps) return std::nullopt;
  auto it = std::lower_bound(v.begin(), v.end(), raw_tenths - kSnapEps);
  return *it;
}

std::optional<int> block_of_arrival(const TimeBlocks& blocks,
                                    RoundingMode mode, Minute arrival) {
  if (blocks.count == 0) return std::nullopt;
  Minute rel = arrival - blocks.start;
  int b;
  if (mode == RoundingMode::Conservative) {
    // First block starting at or after the arrival.
    b = rel <= 0 ? 0 : (rel + blocks.length - 1) / blocks.length;
  } else {
    // Block containing the arrival (its start may lie before it).
    if (rel < 0) return std::nullopt;
    b = rel / blocks.length;
  }
  if (b >= blocks.count) return std::nullopt;
  return b;
}

} // namespace evsp
