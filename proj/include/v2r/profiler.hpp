#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "v2r/executors.hpp"

namespace v2r {

class ProfileCache;

// Measured latency statistics and throughput for one
// (model, device, batch size) triple.
struct ProfileRecord {
  std::string model_id;
  std::string device_tag = "cpu-local";
  uint32_t batch_size = 1;
  float lat_mean_ms = 0.0f;
  float lat_p50_ms = 0.0f;
  float lat_p95_ms = 0.0f;
  float lat_p99_ms = 0.0f;
  float throughput_ips = 0.0f;  // batch_size / lat_mean_ms * 1000
  uint32_t iterations = 0;
  uint64_t measured_at = 0;  // UTC ms

  void validate() const;  // throws InvalidRecord

  bool operator==(const ProfileRecord&) const = default;
};

// Nearest-rank percentile: sort ascending, element at index ceil(p*n) - 1.
float percentile(std::span<const float> samples, float p);

struct ProfileOptions {
  std::vector<uint32_t> batch_sizes = {1, 2, 4, 8, 16, 32, 64};
  uint32_t warmup = 3;
  uint32_t iterations = 30;
  std::string device_tag = "cpu-local";
  uint64_t seed = 42;  // input synthesis
};

struct ProfileResult {
  std::vector<ProfileRecord> records;
  // Set when an executor failure aborted the sweep; records hold the
  // completed batch sizes.
  std::optional<std::string> error;
};

// Times `iterations` execute calls per batch size after `warmup` discarded
// runs. Input synthesis is outside the timed window. Records are pushed to
// `cache` when given. Runs are strictly sequential.
ProfileResult profile_model(const std::string& model_id, const Executor& executor,
                            const ProfileOptions& opts, ProfileCache* cache = nullptr);

}  // namespace v2r
