#include "adlforge/model/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace adlforge {

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  // Rejection sampling on the top of the range keeps draws unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

int Rng::uniform_int(int lo, int hi) {
  return lo + static_cast<int>(uniform_index(static_cast<std::uint64_t>(hi - lo) + 1));
}

double Rng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal(double mean, double stddev) {
  // Box-Muller; one draw per call keeps the stream position simple.
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace adlforge
