#pragma once

#include <cstddef>
#include <functional>

namespace adlforge {

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Results must be
/// written to per-index slots so ordering never depends on scheduling. The
/// first exception (lowest index) is rethrown after all workers stop.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace adlforge
