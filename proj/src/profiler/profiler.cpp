#include "v2r/profiler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "v2r/clock.hpp"
#include "v2r/orchestrator.hpp"
#include "v2r/rng.hpp"

namespace v2r {

void ProfileRecord::validate() const {
  if (model_id.empty()) raise(Errc::invalid_record, "model_id empty");
  if (batch_size < 1) raise(Errc::invalid_record, "batch_size must be >= 1");
  if (iterations < 1) raise(Errc::invalid_record, "iterations must be >= 1");
  if (!(lat_mean_ms > 0.0f)) raise(Errc::invalid_record, "lat_mean must be > 0");
  if (!(lat_p50_ms > 0.0f && lat_p95_ms > 0.0f && lat_p99_ms > 0.0f))
    raise(Errc::invalid_record, "latency percentiles must be > 0");
  if (lat_p50_ms > lat_p95_ms || lat_p95_ms > lat_p99_ms)
    raise(Errc::invalid_record, "percentiles must satisfy p50 <= p95 <= p99");
  float expect = static_cast<float>(batch_size) / lat_mean_ms * 1000.0f;
  if (std::abs(throughput_ips - expect) > 1e-3f * std::max(1.0f, expect))
    raise(Errc::invalid_record, "throughput does not match batch_size / lat_mean");
}

float percentile(std::span<const float> samples, float p) {
  if (samples.empty()) raise(Errc::empty_samples, "percentile of empty sample set");
  if (!(p > 0.0f) || p > 1.0f) raise(Errc::invalid_argument, "p must be in (0, 1]");
  std::vector<float> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  size_t rank = static_cast<size_t>(std::ceil(static_cast<double>(p) * sorted.size()));
  return sorted[rank - 1];
}

namespace {

std::vector<Tensor> synth_batch(const TensorSpec& spec, uint32_t batch, uint64_t seed) {
  auto dims = spec.item_dims();
  std::vector<Tensor> out;
  out.reserve(batch);
  SplitMix64 g(seed);
  for (uint32_t i = 0; i < batch; ++i) {
    Tensor t = Tensor::zeros(spec.dtype, dims);
    if (spec.dtype == Dtype::u8) {
      for (auto& b : t.data) b = static_cast<uint8_t>(g.next());
    } else {
      for (float& v : t.f32()) v = g.next_signed_unit();
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

ProfileResult profile_model(const std::string& model_id, const Executor& executor,
                            const ProfileOptions& opts, ProfileCache* cache) {
  if (opts.iterations < 5) raise(Errc::invalid_argument, "iterations must be >= 5");
  if (opts.batch_sizes.empty()) raise(Errc::invalid_argument, "batch_sizes empty");
  for (size_t i = 0; i < opts.batch_sizes.size(); ++i) {
    if (opts.batch_sizes[i] < 1) raise(Errc::invalid_argument, "batch sizes must be >= 1");
    if (i > 0 && opts.batch_sizes[i] <= opts.batch_sizes[i - 1])
      raise(Errc::invalid_argument, "batch sizes must be strictly increasing");
  }
  if (opts.batch_sizes.back() > executor.max_batch())
    raise(Errc::batch_too_large, "batch size exceeds executor max");

  using clock = std::chrono::steady_clock;
  ProfileResult result;
  for (uint32_t b : opts.batch_sizes) {
    std::vector<Tensor> inputs = synth_batch(executor.input_spec(), b, opts.seed ^ b);
    std::vector<float> lat;
    lat.reserve(opts.iterations);
    try {
      for (uint32_t i = 0; i < opts.warmup; ++i)
        executor.execute(std::span<const Tensor>(inputs));
      for (uint32_t i = 0; i < opts.iterations; ++i) {
        auto t0 = clock::now();
        executor.execute(std::span<const Tensor>(inputs));
        auto t1 = clock::now();
        lat.push_back(std::chrono::duration<float, std::milli>(t1 - t0).count());
      }
    } catch (const Error& e) {
      result.error = std::string(errc_name(e.code())) + ": " + e.what();
      return result;
    }

    ProfileRecord rec;
    rec.model_id = model_id;
    rec.device_tag = opts.device_tag;
    rec.batch_size = b;
    float sum = 0.0f;
    for (float v : lat) sum += v;
    rec.lat_mean_ms = sum / static_cast<float>(lat.size());
    rec.lat_p50_ms = percentile(lat, 0.50f);
    rec.lat_p95_ms = percentile(lat, 0.95f);
    rec.lat_p99_ms = percentile(lat, 0.99f);
    rec.throughput_ips = static_cast<float>(b) / rec.lat_mean_ms * 1000.0f;
    rec.iterations = opts.iterations;
    rec.measured_at = utc_now_ms();
    if (cache != nullptr) cache->put(rec);
    result.records.push_back(std::move(rec));
  }
  return result;
}

}  // namespace v2r
