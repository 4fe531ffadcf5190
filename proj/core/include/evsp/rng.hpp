#pragma once

#include <cstdint>
#include <random>

namespace evsp {

// Seeded random source for the instance generator. std::mt19937_64 produces
// the same bit stream everywhere, but the standard distributions are not
// required to, so the int/real mappings are written out by hand to keep
// generated instances byte-identical across platforms and library versions.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [lo, hi]. The modulo bias is negligible for the small
  // ranges used here and keeps the mapping trivially reproducible.
  int uniform_int(int lo, int hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next() % span);
  }

  // Uniform double in [lo, hi) built from the top 53 bits.
  double uniform_real(double lo, double hi) {
    double unit = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return lo + unit * (hi - lo);
  }

private:
  std::mt19937_64 engine_;
};

} // namespace evsp
