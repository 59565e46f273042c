#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace adlforge {

/// Seeded generator whose derived draws are identical across standard
/// libraries (std distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);
  /// Uniform real in [0, 1).
  double uniform01();
  double normal(double mean, double stddev);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace adlforge
