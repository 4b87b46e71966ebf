#include "nativqa/rate_limit.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace nativqa {

Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int attempt) {
  double ms = static_cast<double>(policy.initial_delay.count()) *
              std::pow(policy.multiplier, attempt);
  return std::chrono::milliseconds(static_cast<long long>(ms));
}

TokenBucket::TokenBucket(double tokens_per_second, double burst)
    : tokens_per_second_(tokens_per_second > 0 ? tokens_per_second : 1.0),
      burst_(burst >= 1.0 ? burst : 1.0),
      tokens_(burst_),
      last_refill_(Clock::now()),
      clock_([] { return Clock::now(); }),
      sleeper_(real_sleeper()) {}

void TokenBucket::set_clock(ClockFn clock) {
  std::lock_guard<std::mutex> lock(mutex_);
  clock_ = std::move(clock);
  last_refill_ = clock_();
  tokens_ = burst_;
}

void TokenBucket::set_sleeper(Sleeper sleeper) {
  std::lock_guard<std::mutex> lock(mutex_);
  sleeper_ = std::move(sleeper);
}

void TokenBucket::acquire() {
  while (true) {
    std::chrono::milliseconds wait{0};
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto now = clock_();
      double elapsed =
          std::chrono::duration<double>(now - last_refill_).count();
      if (elapsed > 0) {
        tokens_ = std::min(burst_, tokens_ + elapsed * tokens_per_second_);
        last_refill_ = now;
      }
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      double needed = (1.0 - tokens_) / tokens_per_second_;
      wait = std::chrono::milliseconds(
          static_cast<long long>(std::ceil(needed * 1000.0)));
    }
    Sleeper sleep;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      sleep = sleeper_;
    }
    sleep(std::max(wait, std::chrono::milliseconds(1)));
  }
}

}  // namespace nativqa
