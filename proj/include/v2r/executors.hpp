#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "v2r/feature.hpp"
#include "v2r/tensor.hpp"

namespace v2r {

struct Prediction {
  std::string label;
  float score = 0.0f;  // in [0,1]

  bool operator==(const Prediction&) const = default;
};

struct ExecutorOutput {
  uint64_t request_id = 0;
  std::vector<Prediction> predictions;  // sorted by descending score
  std::optional<FeatureVector> feature;

  bool operator==(const ExecutorOutput&) const = default;
};

struct BatchItem {
  uint64_t request_id = 0;
  const Tensor* tensor = nullptr;
};

// Pluggable model-executor contract. Executors are immutable after
// construction; execute is safe to call concurrently.
class Executor {
 public:
  virtual ~Executor() = default;

  virtual const TensorSpec& input_spec() const = 0;
  // Feature dimension of emitted embeddings; 0 when the executor emits none.
  virtual uint32_t feature_dim() const { return 0; }
  virtual uint32_t max_batch() const { return 256; }

  // Validates the batch (non-empty, within max_batch, every tensor conforms
  // to input_spec) then runs it. One output per input, order preserved.
  std::vector<ExecutorOutput> execute(std::span<const BatchItem> batch) const;

  // Convenience: request ids 0..n-1.
  std::vector<ExecutorOutput> execute(std::span<const Tensor> batch) const;

 protected:
  virtual std::vector<ExecutorOutput> run(std::span<const BatchItem> batch) const = 0;
};

// ---- built-in: synthetic latency model ----

struct SyntheticLatencyParams {
  float a_ms = 8.0f;       // fixed cost
  float s_ms = 0.5f;       // per-item cost
  float q_ms = 0.05f;      // quadratic contention cost
  float jitter_frac = 0.0f;  // in [0, 0.5]

  void validate() const;
  // a + s*b + q*b^2, before jitter
  double latency_ms(uint32_t batch) const {
    return a_ms + static_cast<double>(s_ms) * batch + static_cast<double>(q_ms) * batch * batch;
  }
};

class SyntheticLatencyExecutor final : public Executor {
 public:
  explicit SyntheticLatencyExecutor(SyntheticLatencyParams params, uint64_t seed = 0,
                                    TensorSpec input = TensorSpec::scalar_batch(Dtype::f32),
                                    uint32_t max_batch = 256);

  const TensorSpec& input_spec() const override { return input_; }
  uint32_t max_batch() const override { return max_batch_; }
  const SyntheticLatencyParams& params() const { return params_; }

 protected:
  std::vector<ExecutorOutput> run(std::span<const BatchItem> batch) const override;

 private:
  SyntheticLatencyParams params_;
  uint64_t seed_;
  TensorSpec input_;
  uint32_t max_batch_;
  mutable std::atomic<uint64_t> calls_{0};  // jitter stream position
};

// ---- built-in: histogram embedding ----

// Per-channel 32-bin intensity histograms (pixel-count-normalized, 96 values)
// projected through a seed-deterministic 96xdim matrix, L2-normalized.
FeatureVector embed_histogram(const Tensor& image_u8_hwc, uint64_t seed, uint32_t dim);

// The projection matrix: entry (r, c) generated row-major from a splitmix64
// stream, each draw mapped into (-1, 1).
std::vector<float> histogram_projection(uint64_t seed, uint32_t dim);

class HistogramEmbeddingExecutor final : public Executor {
 public:
  HistogramEmbeddingExecutor(uint64_t seed, uint32_t dim, uint32_t input_h = 64,
                             uint32_t input_w = 64, uint32_t max_batch = 256);

  const TensorSpec& input_spec() const override { return input_; }
  uint32_t feature_dim() const override { return dim_; }
  uint32_t max_batch() const override { return max_batch_; }
  uint64_t seed() const { return seed_; }

 protected:
  std::vector<ExecutorOutput> run(std::span<const BatchItem> batch) const override;

 private:
  uint64_t seed_;
  uint32_t dim_;
  TensorSpec input_;
  uint32_t max_batch_;
  std::vector<float> projection_;  // 96 x dim, row-major
};

// Sleeps `ms` with sub-slack precision (coarse sleep then a short spin).
void sleep_precise_ms(double ms);

}  // namespace v2r
