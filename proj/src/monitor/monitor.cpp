#include "v2r/monitor.hpp"

#include <cmath>

namespace v2r {

void WorkerStatus::validate() const {
  if (worker_id.empty()) raise(Errc::malformed_status, "worker_id empty");
  if (!(cpu_pct >= 0.0f && cpu_pct <= 100.0f) || !std::isfinite(cpu_pct))
    raise(Errc::malformed_status, "cpu_pct out of [0,100]");
  if (device_util_pct.has_value() &&
      (!(*device_util_pct >= 0.0f && *device_util_pct <= 100.0f) ||
       !std::isfinite(*device_util_pct)))
    raise(Errc::malformed_status, "device_util_pct out of [0,100]");
}

bool StatusTable::publish(const WorkerStatus& status) {
  status.validate();
  std::lock_guard lock(mu_);
  auto it = latest_.find(status.worker_id);
  if (it != latest_.end() && status.timestamp < it->second.timestamp) {
    ++drops_;
    return false;
  }
  latest_.insert_or_assign(status.worker_id, status);
  return true;
}

ClusterSnapshot StatusTable::snapshot(uint32_t ttl_ms, uint64_t now_utc_ms) const {
  std::lock_guard lock(mu_);
  ClusterSnapshot snap;
  snap.taken_at = now_utc_ms;
  snap.drops = drops_;
  for (const auto& [id, status] : latest_) {
    bool stale = now_utc_ms > status.timestamp && now_utc_ms - status.timestamp > ttl_ms;
    snap.workers.emplace(id, ClusterSnapshot::Entry{status, stale});
  }
  return snap;
}

uint64_t StatusTable::drops() const {
  std::lock_guard lock(mu_);
  return drops_;
}

}  // namespace v2r
