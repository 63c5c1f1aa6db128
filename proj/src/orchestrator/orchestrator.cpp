#include "v2r/orchestrator.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "v2r/batch_queue.hpp"

namespace v2r {

using nlohmann::json;

const char* pctl_name(Pctl p) {
  switch (p) {
    case Pctl::p50: return "p50";
    case Pctl::p95: return "p95";
    case Pctl::p99: return "p99";
  }
  return "p95";
}

Pctl pctl_from_name(const std::string& s) {
  if (s == "p50") return Pctl::p50;
  if (s == "p95") return Pctl::p95;
  if (s == "p99") return Pctl::p99;
  raise(Errc::invalid_argument, "percentile must be p50, p95 or p99");
}

float latency_at(const ProfileRecord& r, Pctl p) {
  switch (p) {
    case Pctl::p50: return r.lat_p50_ms;
    case Pctl::p95: return r.lat_p95_ms;
    case Pctl::p99: return r.lat_p99_ms;
  }
  return r.lat_p95_ms;
}

void SloPolicy::validate() const {
  if (!(slo_ms > 0.0f) || !std::isfinite(slo_ms))
    raise(Errc::invalid_argument, "slo_ms must be finite and positive");
}

namespace {

json record_to_json(const ProfileRecord& r) {
  return json{{"model_id", r.model_id},       {"device_tag", r.device_tag},
              {"batch_size", r.batch_size},   {"lat_mean_ms", r.lat_mean_ms},
              {"lat_p50_ms", r.lat_p50_ms},   {"lat_p95_ms", r.lat_p95_ms},
              {"lat_p99_ms", r.lat_p99_ms},   {"throughput_ips", r.throughput_ips},
              {"iterations", r.iterations},   {"measured_at", r.measured_at}};
}

ProfileRecord record_from_json(const json& j) {
  ProfileRecord r;
  r.model_id = j.at("model_id").get<std::string>();
  r.device_tag = j.at("device_tag").get<std::string>();
  r.batch_size = j.at("batch_size").get<uint32_t>();
  r.lat_mean_ms = j.at("lat_mean_ms").get<float>();
  r.lat_p50_ms = j.at("lat_p50_ms").get<float>();
  r.lat_p95_ms = j.at("lat_p95_ms").get<float>();
  r.lat_p99_ms = j.at("lat_p99_ms").get<float>();
  r.throughput_ips = j.at("throughput_ips").get<float>();
  r.iterations = j.at("iterations").get<uint32_t>();
  r.measured_at = j.at("measured_at").get<uint64_t>();
  return r;
}

}  // namespace

ProfileCache::ProfileCache(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(*path_);
  if (!in.is_open()) return;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ProfileRecord r;
    try {
      r = record_from_json(json::parse(line));
      r.validate();
    } catch (const std::exception&) {
      continue;  // torn or stale line
    }
    Key key{r.model_id, r.device_tag, r.batch_size};
    auto it = cache_.find(key);
    if (it == cache_.end() || r.measured_at >= it->second.measured_at)
      cache_.insert_or_assign(key, std::move(r));
  }
}

void ProfileCache::put(const ProfileRecord& record) {
  record.validate();
  std::unique_lock lock(mu_);
  Key key{record.model_id, record.device_tag, record.batch_size};
  auto it = cache_.find(key);
  if (it != cache_.end() && record.measured_at < it->second.measured_at) return;  // older loses
  cache_.insert_or_assign(key, record);
  if (path_.has_value()) {
    std::ofstream out(*path_, std::ios::app);
    if (!out.is_open()) raise(Errc::storage_failure, "cannot append profile cache");
    out << record_to_json(record).dump() << "\n";
  }
}

std::vector<ProfileRecord> ProfileCache::records_for(const std::string& model_id,
                                                     const std::string& device_tag) const {
  std::shared_lock lock(mu_);
  std::vector<ProfileRecord> out;
  for (const auto& [key, rec] : cache_)
    if (std::get<0>(key) == model_id && std::get<1>(key) == device_tag) out.push_back(rec);
  return out;  // map order: ascending batch size
}

std::vector<ProfileRecord> ProfileCache::all() const {
  std::shared_lock lock(mu_);
  std::vector<ProfileRecord> out;
  for (const auto& [key, rec] : cache_) out.push_back(rec);
  return out;
}

size_t ProfileCache::size() const {
  std::shared_lock lock(mu_);
  return cache_.size();
}

BatchPlan plan_batch(const ProfileCache& cache, const std::string& model_id,
                     const SloPolicy& policy, const std::string& device_tag) {
  policy.validate();
  auto records = cache.records_for(model_id, device_tag);
  if (records.empty())
    raise(Errc::no_profile, "no profile for (" + model_id + ", " + device_tag + ")");

  BatchPlan plan;
  plan.model_id = model_id;
  for (const auto& r : records) plan.derived_from.emplace_back(r.batch_size, r.measured_at);

  const ProfileRecord* best = nullptr;
  for (const auto& r : records) {
    if (latency_at(r, policy.percentile) > policy.slo_ms) continue;
    if (best == nullptr || r.throughput_ips > best->throughput_ips ||
        (r.throughput_ips == best->throughput_ips && r.batch_size < best->batch_size))
      best = &r;
  }
  if (best != nullptr) {
    plan.batch_size = best->batch_size;
    plan.expected_latency_ms = latency_at(*best, policy.percentile);
    plan.expected_throughput_ips = best->throughput_ips;
    plan.slo_satisfied = true;
    return plan;
  }

  // Nothing fits: fall back to b=1's record, or the smallest profiled b.
  const ProfileRecord* fallback = &records.front();
  for (const auto& r : records)
    if (r.batch_size < fallback->batch_size) fallback = &r;
  plan.batch_size = fallback->batch_size;
  plan.expected_latency_ms = latency_at(*fallback, policy.percentile);
  plan.expected_throughput_ips = fallback->throughput_ips;
  plan.slo_satisfied = false;
  return plan;
}

void push_plan(BatchingEngine& engine, const BatchPlan& plan) {
  if (plan.batch_size < 1) raise(Errc::invalid_argument, "plan batch_size must be >= 1");
  engine.set_batch_size(plan.model_id, plan.batch_size);
}

}  // namespace v2r
