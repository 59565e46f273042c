#include "adlforge/backends/rate_limiter.hpp"

#include <thread>

namespace adlforge::backends {

void RateLimiter::set_rate(double per_minute) {
  std::lock_guard lk(mu_);
  per_minute_ = per_minute > 0 ? per_minute : 0.0;
}

double RateLimiter::rate() const {
  std::lock_guard lk(mu_);
  return per_minute_;
}

void RateLimiter::acquire() {
  using clock = std::chrono::steady_clock;
  clock::time_point slot;
  {
    std::lock_guard lk(mu_);
    if (per_minute_ <= 0) return;
    const auto interval = std::chrono::duration_cast<clock::duration>(
        std::chrono::duration<double>(60.0 / per_minute_));
    const auto now = clock::now();
    slot = std::max(now, next_slot_);
    next_slot_ = slot + interval;
  }
  std::this_thread::sleep_until(slot);
}

RateLimiter& RateLimiter::global() {
  static RateLimiter limiter;
  return limiter;
}

}  // namespace adlforge::backends
