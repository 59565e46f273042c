#pragma once

#include <chrono>
#include <mutex>

namespace adlforge::backends {

/// Spaces wire calls to at most `per_minute` per minute (0 = unlimited).
class RateLimiter {
 public:
  explicit RateLimiter(double per_minute = 0.0) { set_rate(per_minute); }

  void set_rate(double per_minute);
  double rate() const;
  /// Blocks until the next call may start.
  void acquire();

  /// The limiter shared by every client in the process.
  static RateLimiter& global();

 private:
  mutable std::mutex mu_;
  double per_minute_ = 0.0;
  std::chrono::steady_clock::time_point next_slot_{};
};

}  // namespace adlforge::backends
