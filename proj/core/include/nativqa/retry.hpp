#pragma once

#include <chrono>
#include <functional>

namespace nativqa {

// Sleep hook so tests can run retry paths instantly.
using Sleeper = std::function<void(std::chrono::milliseconds)>;

Sleeper real_sleeper();

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_delay{1000};
  double multiplier = 2.0;
};

std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int attempt);

// Runs fn up to policy.max_attempts times, sleeping the exponential backoff
// between attempts. Retries only while is_retriable(exception) says so;
// otherwise (or after the last attempt) the exception propagates.
template <typename Fn>
auto retry_with_backoff(Fn&& fn, const RetryPolicy& policy,
                        const std::function<bool(const std::exception&)>& is_retriable,
                        const Sleeper& sleep) -> decltype(fn()) {
  for (int attempt = 0;; ++attempt) {
    try {
      return fn();
    } catch (const std::exception& e) {
      if (attempt + 1 >= policy.max_attempts || !is_retriable(e)) {
        throw;
      }
      sleep(backoff_delay(policy, attempt));
    }
  }
}

}  // namespace nativqa
