#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "v2r/clock.hpp"
#include "v2r/errors.hpp"

namespace v2r {

struct WorkerStatus {
  std::string worker_id;
  uint64_t timestamp = 0;  // UTC ms
  float cpu_pct = 0.0f;    // [0, 100]
  uint64_t mem_bytes = 0;
  std::map<std::string, uint32_t> queue_depths;  // model_id -> depth
  std::map<std::string, uint32_t> inflight;      // model_id -> in-flight batches
  std::optional<float> device_util_pct;          // [0, 100]

  void validate() const;  // throws MalformedStatus

  bool operator==(const WorkerStatus&) const = default;
};

struct ClusterSnapshot {
  uint64_t taken_at = 0;  // UTC ms
  uint64_t drops = 0;     // out-of-order publishes dropped so far
  struct Entry {
    WorkerStatus status;
    bool stale = false;

    bool operator==(const Entry&) const = default;
  };
  std::map<std::string, Entry> workers;
};

// Master-side latest-per-worker table. Last writer wins by timestamp; older
// publishes are dropped and counted.
class StatusTable {
 public:
  // False when the publish was dropped (timestamp older than stored).
  bool publish(const WorkerStatus& status);

  // stale <=> taken_at - status.timestamp > ttl_ms
  ClusterSnapshot snapshot(uint32_t ttl_ms, uint64_t now_utc_ms) const;
  ClusterSnapshot snapshot(uint32_t ttl_ms) const { return snapshot(ttl_ms, utc_now_ms()); }

  uint64_t drops() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, WorkerStatus> latest_;
  uint64_t drops_ = 0;
};

}  // namespace v2r
