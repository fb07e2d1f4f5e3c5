#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>

namespace cfh::llm {

using SteadyClockFn = std::function<std::chrono::steady_clock::time_point()>;
using SleepFn = std::function<void(std::chrono::milliseconds)>;

inline SleepFn real_sleep() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

/// Token bucket: `per_minute` tokens refill continuously, bucket holds at most
/// `burst`. acquire() blocks until a token is available.
class RateLimiter {
 public:
  explicit RateLimiter(double per_minute = 30.0, double burst = 1.0,
                       SteadyClockFn clock = [] { return std::chrono::steady_clock::now(); },
                       SleepFn sleep = real_sleep())
      : per_ms_(per_minute / 60000.0),
        burst_(std::max(1.0, burst)),
        tokens_(std::max(1.0, burst)),
        clock_(std::move(clock)),
        sleep_(std::move(sleep)),
        last_(clock_()) {}

  void acquire() {
    if (per_ms_ <= 0) return;  // unlimited
    while (true) {
      std::chrono::milliseconds wait{0};
      {
        std::lock_guard lock(mu_);
        refill();
        if (tokens_ >= 1.0) {
          tokens_ -= 1.0;
          return;
        }
        wait = std::chrono::milliseconds(static_cast<long long>(std::ceil((1.0 - tokens_) / per_ms_)));
      }
      sleep_(std::max(wait, std::chrono::milliseconds(1)));
    }
  }

 private:
  void refill() {
    const auto now = clock_();
    const double elapsed = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    tokens_ = std::min(burst_, tokens_ + elapsed * per_ms_);
  }

  double per_ms_;
  double burst_;
  double tokens_;
  SteadyClockFn clock_;
  SleepFn sleep_;
  std::chrono::steady_clock::time_point last_;
  std::mutex mu_;
};

}  // namespace cfh::llm
