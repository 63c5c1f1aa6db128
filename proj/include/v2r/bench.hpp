#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "v2r/executors.hpp"
#include "v2r/profiler.hpp"

namespace v2r {

// Measurement suites behind `v2r bench`; the acceptance criteria consume the
// same structs.

struct DecodeBenchResult {
  uint32_t frames = 0;
  uint32_t width = 0;
  uint32_t height = 0;
  double read_ms = 0.0;
  double hist_ms = 0.0;
  double fps = 0.0;  // frames / (read + hist)
};

// Writes a random rgb8 stream to a temp file, then times read_stream plus a
// full per-frame histogram pass.
DecodeBenchResult bench_decode(uint32_t frames, uint32_t width, uint32_t height, uint64_t seed);

struct KeyframeBenchResult {
  uint32_t frames = 0;
  uint32_t shots_detected = 0;
  uint32_t keyframe_requests = 0;
  uint32_t allframes_requests = 0;
  double keyframe_wall_ms = 0.0;
  double allframes_wall_ms = 0.0;
  double speedup = 0.0;
};

KeyframeBenchResult bench_keyframe(uint32_t frames, uint32_t shots, uint32_t width, uint32_t height,
                                   const SyntheticLatencyParams& params, uint32_t batch_size,
                                   uint64_t seed);

struct BatchCurveResult {
  std::vector<ProfileRecord> points;  // ascending batch size
  uint32_t peak_batch = 0;            // argmax measured throughput
};

BatchCurveResult bench_batchcurve(const SyntheticLatencyParams& params, uint32_t batch_min,
                                  uint32_t batch_max, uint32_t warmup, uint32_t iterations,
                                  uint64_t seed);

struct MatchBenchResult {
  uint32_t n = 0;
  uint32_t dim = 0;
  uint32_t k = 0;
  uint32_t queries = 0;
  double single_thread_ms_per_query = 0.0;
  double pooled_ms_per_query = 0.0;
  uint32_t pool_threads = 0;
  // Fraction of queries whose (id, rank) list matches the brute-force oracle;
  // set when verification was requested.
  std::optional<double> oracle_agreement;
};

MatchBenchResult bench_match(uint32_t n, uint32_t dim, uint32_t k, uint32_t queries, bool verify,
                             uint32_t pool_threads, uint64_t seed);

}  // namespace v2r
