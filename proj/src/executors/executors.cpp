#include "v2r/executors.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include "v2r/kernels.hpp"
#include "v2r/rng.hpp"

namespace v2r {

std::vector<ExecutorOutput> Executor::execute(std::span<const BatchItem> batch) const {
  if (batch.empty()) raise(Errc::shape_mismatch, "empty batch rejected");
  if (batch.size() > max_batch())
    raise(Errc::batch_too_large,
          "batch of " + std::to_string(batch.size()) + " exceeds max " + std::to_string(max_batch()));
  const TensorSpec& spec = input_spec();
  for (size_t i = 0; i < batch.size(); ++i) {
    if (batch[i].tensor == nullptr || !spec.item_matches(*batch[i].tensor))
      raise(Errc::shape_mismatch, "batch item " + std::to_string(i) + " violates input spec " + spec.str());
  }
  return run(batch);
}

std::vector<ExecutorOutput> Executor::execute(std::span<const Tensor> batch) const {
  std::vector<BatchItem> items;
  items.reserve(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) items.push_back({static_cast<uint64_t>(i), &batch[i]});
  return execute(std::span<const BatchItem>(items));
}

void sleep_precise_ms(double ms) {
  using clock = std::chrono::steady_clock;
  if (ms <= 0.0) return;
  auto deadline = clock::now() + std::chrono::duration_cast<clock::duration>(
                                     std::chrono::duration<double, std::milli>(ms));
  // Coarse sleep leaves ~200us for the spin so overshoot stays tiny.
  auto coarse = deadline - std::chrono::microseconds(200);
  if (clock::now() < coarse) std::this_thread::sleep_until(coarse);
  while (clock::now() < deadline) {
  }
}

void SyntheticLatencyParams::validate() const {
  if (!(a_ms > 0.0f) || !std::isfinite(a_ms)) raise(Errc::invalid_argument, "a_ms must be > 0");
  if (s_ms < 0.0f || !std::isfinite(s_ms)) raise(Errc::invalid_argument, "s_ms must be >= 0");
  if (q_ms < 0.0f || !std::isfinite(q_ms)) raise(Errc::invalid_argument, "q_ms must be >= 0");
  if (jitter_frac < 0.0f || jitter_frac > 0.5f)
    raise(Errc::invalid_argument, "jitter_frac must be in [0, 0.5]");
}

SyntheticLatencyExecutor::SyntheticLatencyExecutor(SyntheticLatencyParams params, uint64_t seed,
                                                   TensorSpec input, uint32_t max_batch)
    : params_(params), seed_(seed), input_(std::move(input)), max_batch_(max_batch) {
  params_.validate();
  input_.validate();
}

std::vector<ExecutorOutput> SyntheticLatencyExecutor::run(std::span<const BatchItem> batch) const {
  double target = params_.latency_ms(static_cast<uint32_t>(batch.size()));
  if (params_.jitter_frac > 0.0f) {
    uint64_t call = calls_.fetch_add(1, std::memory_order_relaxed);
    SplitMix64 g(seed_ ^ (call * 0x9E3779B97F4A7C15ULL + 1));
    double u = g.next_unit() * 2.0 - 1.0;  // [-1, 1)
    target *= 1.0 + u * params_.jitter_frac;
  }
  sleep_precise_ms(target);
  std::vector<ExecutorOutput> out;
  out.reserve(batch.size());
  for (const BatchItem& item : batch) {
    ExecutorOutput o;
    o.request_id = item.request_id;
    o.predictions = {{"ok", 1.0f}};
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<float> histogram_projection(uint64_t seed, uint32_t dim) {
  std::vector<float> m(static_cast<size_t>(96) * dim);
  SplitMix64 g(seed);
  for (float& v : m) v = g.next_signed_unit();
  return m;
}

namespace {

FeatureVector embed_with(const std::vector<float>& projection, uint32_t dim, const Tensor& image) {
  if (image.dtype != Dtype::u8 || image.dims.size() != 3 || image.dims[2] != 3 ||
      image.dims[0] < 1 || image.dims[1] < 1)
    raise(Errc::bad_dimensions, "image must be u8 HxWx3 with H,W >= 1");

  const size_t pixels = static_cast<size_t>(image.dims[0]) * image.dims[1];
  uint32_t bins[96];
  kernels::hist32_u8(image.u8().data(), pixels, 3, bins);

  float hist[96];
  const float inv = 1.0f / static_cast<float>(pixels);
  for (int i = 0; i < 96; ++i) hist[i] = static_cast<float>(bins[i]) * inv;

  FeatureVector f;
  f.values.assign(dim, 0.0f);
  for (int r = 0; r < 96; ++r) {
    if (hist[r] != 0.0f)
      kernels::axpy_f32(hist[r], projection.data() + static_cast<size_t>(r) * dim,
                        f.values.data(), dim);
  }
  float norm = std::sqrt(kernels::dot_f32(f.values.data(), f.values.data(), dim));
  if (norm > 0.0f) kernels::scale_f32(f.values.data(), dim, 1.0f / norm);
  return f;
}

}  // namespace

FeatureVector embed_histogram(const Tensor& image_u8_hwc, uint64_t seed, uint32_t dim) {
  if (dim < 8) raise(Errc::bad_dimensions, "embedding dim must be >= 8");
  return embed_with(histogram_projection(seed, dim), dim, image_u8_hwc);
}

HistogramEmbeddingExecutor::HistogramEmbeddingExecutor(uint64_t seed, uint32_t dim, uint32_t input_h,
                                                       uint32_t input_w, uint32_t max_batch)
    : seed_(seed), dim_(dim), max_batch_(max_batch) {
  if (dim < 8) raise(Errc::bad_dimensions, "embedding dim must be >= 8");
  if (input_h < 1 || input_w < 1) raise(Errc::bad_dimensions, "input dims must be >= 1");
  input_.dtype = Dtype::u8;
  input_.dims = {TensorSpec::batch_dim(), TensorSpec::fixed(input_h), TensorSpec::fixed(input_w),
                 TensorSpec::fixed(3)};
  projection_ = histogram_projection(seed, dim);
}

std::vector<ExecutorOutput> HistogramEmbeddingExecutor::run(std::span<const BatchItem> batch) const {
  std::vector<ExecutorOutput> out;
  out.reserve(batch.size());
  for (const BatchItem& item : batch) {
    ExecutorOutput o;
    o.request_id = item.request_id;
    FeatureVector f = embed_with(projection_, dim_, *item.tensor);
    f.id = item.request_id;
    o.feature = std::move(f);
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace v2r
