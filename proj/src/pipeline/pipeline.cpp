#include "v2r/pipeline.hpp"

#include <chrono>

#include "v2r/preprocess.hpp"
#include "v2r/protocol.hpp"
#include "v2r/server.hpp"

namespace v2r {

std::shared_ptr<Executor> make_executor(const ModelManifest& manifest, uint64_t seed,
                                        const SyntheticLatencyParams& synth_params) {
  switch (manifest.task) {
    case ModelTask::embedding: {
      auto in_dims = manifest.input_spec.item_dims();
      if (in_dims.size() != 3 || in_dims[2] != 3)
        raise(Errc::invalid_manifest, "embedding input spec must be [batch,]H,W,3");
      auto out_dims = manifest.output_spec.item_dims();
      if (out_dims.size() != 1)
        raise(Errc::invalid_manifest, "embedding output spec must be 1-d");
      return std::make_shared<HistogramEmbeddingExecutor>(seed, out_dims[0], in_dims[0],
                                                          in_dims[1]);
    }
    case ModelTask::synthetic:
      return std::make_shared<SyntheticLatencyExecutor>(synth_params, seed, manifest.input_spec);
    default:
      raise(Errc::unknown_model,
            std::string("no built-in executor for task ") + task_name(manifest.task));
  }
}

namespace {

struct InferBackend {
  const Executor* local = nullptr;
  FrameClient* remote = nullptr;
  std::string model_id;
  uint64_t next_correlation = 1;

  std::vector<ExecutorOutput> infer(const InferenceBatch& batch) {
    if (remote == nullptr) {
      std::vector<BatchItem> items;
      items.reserve(batch.requests.size());
      for (const auto& r : batch.requests) items.push_back({r.request_id, &r.payload});
      return local->execute(std::span<const BatchItem>(items));
    }
    InferRequestMsg msg;
    msg.model_id = model_id;
    for (const auto& r : batch.requests) msg.items.push_back({r.request_id, r.payload});
    Frame f;
    f.type = MsgType::infer_request;
    f.correlation_id = next_correlation++;
    f.body = encode_infer_request(msg);
    remote->send(f);
    Frame reply = remote->recv();
    if (reply.type == MsgType::error) {
      ErrorMsg err = decode_error(reply.body);
      raise(Errc::executor_failure, "server error: " + err.message);
    }
    if (reply.type != MsgType::infer_response || reply.correlation_id != f.correlation_id)
      raise(Errc::malformed_body, "unexpected reply frame");
    return decode_infer_response(reply.body).outputs;
  }
};

}  // namespace

PipelineReport run_pipeline(const PipelineOptions& opts) {
  if (opts.executor == nullptr) raise(Errc::invalid_argument, "pipeline needs an executor");
  auto t0 = std::chrono::steady_clock::now();

  FrameStream stream =
      opts.stream.has_value() ? *opts.stream : read_stream(opts.stream_path);

  PipelineReport report;
  report.frames = stream.frame_count;
  report.shots = detect_shots(stream, opts.threshold, opts.min_shot_len);

  // keyframe economy: one request per shot unless all-frames mode; query mode
  // infers just the query frame
  std::vector<uint32_t> frames_to_infer;
  if (opts.query_mode) {
    if (opts.query_frame >= stream.frame_count)
      raise(Errc::invalid_argument, "query frame out of range");
    frames_to_infer.push_back(opts.query_frame);
  } else if (opts.all_frames) {
    frames_to_infer.resize(stream.frame_count);
    for (uint32_t i = 0; i < stream.frame_count; ++i) frames_to_infer[i] = i;
  } else {
    for (const Shot& s : report.shots) frames_to_infer.push_back(s.keyframe);
  }

  const TensorSpec& spec = opts.executor->input_spec();
  auto item_dims = spec.item_dims();
  if (item_dims.size() != 3)
    raise(Errc::invalid_argument, "pipeline expects an image executor (H,W,C input)");
  uint32_t th = item_dims[0], tw = item_dims[1], tc = item_dims[2];
  if (tc != stream.channels && !(tc == 3 && stream.channels == 3))
    raise(Errc::payload_mismatch, "stream channels do not match executor input");

  std::unique_ptr<FrameClient> client;
  InferBackend backend;
  backend.model_id = opts.model_id;
  if (opts.connect.has_value()) {
    auto [host, port] = parse_host_port(*opts.connect);
    client = std::make_unique<FrameClient>(host, port);
    backend.remote = client.get();
  } else {
    backend.local = opts.executor.get();
  }

  // index mode state
  std::optional<FlatIndex> index;
  std::optional<FeatureFileWriter> sink;
  uint32_t feature_dim = opts.executor->feature_dim();
  if (!opts.query_mode) {
    if (feature_dim > 0) {
      index.emplace(feature_dim, Metric::cosine);
      if (opts.sink_out.has_value()) sink.emplace(*opts.sink_out, feature_dim);
    }
  }

  BatchingEngine engine;
  engine.open_queue(opts.model_id, spec, opts.batch_size);

  std::vector<FeatureVector> collected;
  auto consume = [&](std::vector<InferenceBatch> batches) {
    for (auto& b : batches) {
      report.batches.emplace_back(static_cast<uint32_t>(b.requests.size()), b.trigger);
      auto outputs = backend.infer(b);
      for (auto& o : outputs) {
        if (o.feature.has_value()) {
          o.feature->id = o.request_id;
          collected.push_back(*o.feature);
        }
      }
    }
  };

  for (uint32_t frame_idx : frames_to_infer) {
    Tensor payload =
        spec.dtype == Dtype::u8
            ? resize_u8(stream.frame(frame_idx), stream.height, stream.width, stream.channels, th,
                        tw)
            : preprocess_image(stream.frame(frame_idx), stream.height, stream.width,
                               stream.channels, th, tw);
    InferenceRequest req;
    req.request_id = frame_idx;  // frame number as request id
    req.model_id = opts.model_id;
    req.payload = std::move(payload);
    req.deadline_ms = opts.deadline_ms;
    consume(engine.submit(std::move(req)));
    ++report.requests_submitted;
  }
  consume(engine.drain(opts.model_id));

  if (!opts.query_mode) {
    if (index.has_value() && !collected.empty()) {
      index->add(collected);
      if (sink.has_value())
        for (const auto& f : collected) sink->append(f);
      report.features_indexed = static_cast<uint32_t>(collected.size());
      if (opts.index_out.has_value()) index->save(*opts.index_out);
    }
  } else {
    if (!opts.index_in.has_value()) raise(Errc::invalid_argument, "query mode needs --index");
    if (collected.empty()) raise(Errc::executor_failure, "executor emitted no feature to query with");
    FlatIndex loaded = FlatIndex::load(*opts.index_in);
    // query with the feature of the requested frame
    const FeatureVector* q = nullptr;
    for (const auto& f : collected)
      if (f.id == opts.query_frame) q = &f;
    if (q == nullptr)
      raise(Errc::invalid_argument,
            "query frame " + std::to_string(opts.query_frame) + " was not inferred");
    report.matches = loaded.search(*q, opts.k, opts.search_threads);
  }

  report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                       .count();
  return report;
}

}  // namespace v2r
