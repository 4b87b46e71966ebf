#pragma once

#include <chrono>
#include <functional>
#include <mutex>

#include "nativqa/retry.hpp"

namespace nativqa {

// Token bucket gating real backend dispatch. Default: 1 request/second,
// burst of 1. acquire() blocks (via the injected sleeper) until a token is
// available; thread-safe, so concurrent fetch tasks serialize here.
class TokenBucket {
 public:
  using Clock = std::chrono::steady_clock;
  using ClockFn = std::function<Clock::time_point()>;

  TokenBucket(double tokens_per_second = 1.0, double burst = 1.0);

  void acquire();

  // Test hooks.
  void set_clock(ClockFn clock);
  void set_sleeper(Sleeper sleeper);

 private:
  double tokens_per_second_;
  double burst_;
  double tokens_;
  Clock::time_point last_refill_;
  ClockFn clock_;
  Sleeper sleeper_;
  std::mutex mutex_;
};

}  // namespace nativqa
