#pragma once

#include <cstdint>
#include <random>

namespace vortexpair {

// The one generator behind every random choice. Uniform draws use the top 53
// bits of each 64-bit output, so sequences do not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  static constexpr const char* kName = "mt19937_64 v1";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace vortexpair
