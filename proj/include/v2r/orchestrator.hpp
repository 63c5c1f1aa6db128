#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

#include "v2r/profiler.hpp"

namespace v2r {

class BatchingEngine;

enum class Pctl : uint8_t { p50 = 0, p95 = 1, p99 = 2 };

const char* pctl_name(Pctl p);
Pctl pctl_from_name(const std::string& s);
float latency_at(const ProfileRecord& r, Pctl p);

struct SloPolicy {
  std::string model_id;
  float slo_ms = 50.0f;
  Pctl percentile = Pctl::p95;

  void validate() const;
};

struct BatchPlan {
  std::string model_id;
  uint32_t batch_size = 1;
  float expected_latency_ms = 0.0f;
  float expected_throughput_ips = 0.0f;
  bool slo_satisfied = false;
  // (batch_size, measured_at) of every record consulted.
  std::vector<std::pair<uint32_t, uint64_t>> derived_from;
};

// Profile cache: keyed by (model_id, device_tag, batch_size), last writer by
// measured_at wins. Optionally persisted as JSON-lines (`profiles.jsonl`),
// replayed on load.
class ProfileCache {
 public:
  ProfileCache() = default;
  // Opens (and loads) a persistent cache; puts append to the file.
  explicit ProfileCache(std::filesystem::path path);

  void put(const ProfileRecord& record);
  std::vector<ProfileRecord> records_for(const std::string& model_id,
                                         const std::string& device_tag) const;
  std::vector<ProfileRecord> all() const;
  size_t size() const;

 private:
  using Key = std::tuple<std::string, std::string, uint32_t>;
  mutable std::shared_mutex mu_;
  std::map<Key, ProfileRecord> cache_;
  std::optional<std::filesystem::path> path_;
};

// Among cached batch sizes whose latency at the policy percentile fits the
// SLO, picks the throughput maximum (ties to the smallest batch size). When
// nothing fits, falls back to the smallest profiled batch size with
// slo_satisfied=false.
BatchPlan plan_batch(const ProfileCache& cache, const std::string& model_id,
                     const SloPolicy& policy, const std::string& device_tag);

// Atomically switches the engine's queue for plan.model_id to
// plan.batch_size. Throws UnknownModelQueue when no such queue exists.
void push_plan(BatchingEngine& engine, const BatchPlan& plan);

}  // namespace v2r
