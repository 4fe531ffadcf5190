#pragma once

#include <stdexcept>
#include <string>

namespace evsp {

// Money is tracked in euro cents. Doubles are fine: all inputs are integer
// cents and the algorithms only add and scale moderate magnitudes.
using Cents = double;

// All times are integer minutes from the start of the instance horizon.
using Minute = int;

// State of charge is stored in tenths of a percent (22% -> 220) so that grid
// membership and comparisons between grid values are exact integer tests.
// Continuous (unrounded) SoC uses doubles in the same scale.
using SocTenths = int;

inline constexpr SocTenths kSocFull = 1000;

// Cost of a dummy covering column, far above any real duty.
inline constexpr Cents kDummyColumnCost = 1e9;

// Thrown for invalid input data and for internal contract violations. The
// message always names the offending entity or quantity.
class EvspError : public std::runtime_error {
public:
  explicit EvspError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace evsp
