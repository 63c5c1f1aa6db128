#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "v2r/batch_queue.hpp"
#include "v2r/executors.hpp"
#include "v2r/frame_stream.hpp"
#include "v2r/matching.hpp"
#include "v2r/registry.hpp"
#include "v2r/shot_detect.hpp"

namespace v2r {

// Builds the built-in executor a manifest describes (HistogramEmbedding for
// task=embedding, SyntheticLatency for task=synthetic).
std::shared_ptr<Executor> make_executor(const ModelManifest& manifest, uint64_t seed,
                                        const SyntheticLatencyParams& synth_params = {});

struct PipelineOptions {
  // input stream: a path, or an already-loaded stream (takes precedence)
  std::filesystem::path stream_path;
  std::optional<FrameStream> stream;

  std::string model_id = "prod-emb";
  std::shared_ptr<Executor> executor;  // required (CLI resolves it from the registry)

  float threshold = 0.35f;
  uint32_t min_shot_len = 2;
  bool all_frames = false;  // bypass keyframe economy: one request per frame

  uint32_t batch_size = 8;
  float deadline_ms = 50.0f;

  // index mode: where features land
  std::optional<std::filesystem::path> index_out;
  std::optional<std::filesystem::path> sink_out;

  // query mode: search an existing index with one frame's feature
  bool query_mode = false;
  std::optional<std::filesystem::path> index_in;
  uint32_t query_frame = 0;
  uint32_t k = 10;
  uint32_t search_threads = 1;

  // When set, batches travel to a remote server as InferRequest frames
  // instead of executing in process.
  std::optional<std::string> connect;
};

struct PipelineReport {
  uint32_t frames = 0;
  std::vector<Shot> shots;
  uint32_t requests_submitted = 0;
  std::vector<std::pair<uint32_t, BatchTrigger>> batches;  // (size, trigger)
  uint32_t features_indexed = 0;
  std::optional<MatchResult> matches;
  double wall_ms = 0.0;
};

// ingest -> shots -> preprocess -> batch -> infer -> index/search.
// Request ids are frame numbers.
PipelineReport run_pipeline(const PipelineOptions& opts);

}  // namespace v2r
