#pragma once

#include <chrono>
#include <cstdint>

namespace v2r {

// Monotonic time source in milliseconds. Batching and deadlines go through
// this so tests can drive a manual clock with zero slack.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now_ms() const = 0;
};

class SteadyClock final : public Clock {
 public:
  double now_ms() const override {
    auto d = std::chrono::steady_clock::now().time_since_epoch();
    return std::chrono::duration<double, std::milli>(d).count();
  }
  static const SteadyClock& instance() {
    static SteadyClock c;
    return c;
  }
};

class ManualClock final : public Clock {
 public:
  explicit ManualClock(double start_ms = 0.0) : now_(start_ms) {}
  double now_ms() const override { return now_; }
  void advance(double ms) { now_ += ms; }
  void set(double ms) { now_ = ms; }

 private:
  double now_;
};

// Wall-clock UTC in milliseconds since the epoch (registered_at, measured_at,
// monitor timestamps).
inline uint64_t utc_now_ms() {
  auto d = std::chrono::system_clock::now().time_since_epoch();
  return static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(d).count());
}

}  // namespace v2r
