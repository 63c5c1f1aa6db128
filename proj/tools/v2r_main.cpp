// v2r: desk-scale video-to-retail serving kernel.
// Subcommands: model register|list, profile, plan, serve, ingest, match,
// status, pipeline, bench, synth. Reports are JSON on stdout; human-readable
// notes go to stderr.

#include <csignal>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "v2r/bench.hpp"
#include "v2r/orchestrator.hpp"
#include "v2r/pipeline.hpp"
#include "v2r/preprocess.hpp"
#include "v2r/server.hpp"
#include "v2r/synth.hpp"

using namespace v2r;
using nlohmann::json;

namespace {

struct GlobalFlags {
  uint64_t seed = 42;
  bool json_only = false;  // silence stderr notes
};

void note(const GlobalFlags& g, const std::string& text) {
  if (!g.json_only) std::cerr << text << "\n";
}

json spec_json(const TensorSpec& s) { return s.str(); }

json manifest_json(const ModelManifest& m) {
  return json{{"model_id", m.model_id},     {"name", m.name},
              {"task", task_name(m.task)},  {"input_spec", spec_json(m.input_spec)},
              {"output_spec", spec_json(m.output_spec)}, {"weight_ref", m.weight_ref},
              {"version", m.version},       {"registered_at", m.registered_at}};
}

json record_json(const ProfileRecord& r) {
  return json{{"model_id", r.model_id},       {"device_tag", r.device_tag},
              {"batch_size", r.batch_size},   {"lat_mean_ms", r.lat_mean_ms},
              {"lat_p50_ms", r.lat_p50_ms},   {"lat_p95_ms", r.lat_p95_ms},
              {"lat_p99_ms", r.lat_p99_ms},   {"throughput_ips", r.throughput_ips},
              {"iterations", r.iterations},   {"measured_at", r.measured_at}};
}

json plan_json(const BatchPlan& p) {
  json derived = json::array();
  for (const auto& [batch, at] : p.derived_from) derived.push_back(json::array({batch, at}));
  return json{{"model_id", p.model_id},
              {"batch_size", p.batch_size},
              {"expected_latency_ms", p.expected_latency_ms},
              {"expected_throughput_ips", p.expected_throughput_ips},
              {"slo_satisfied", p.slo_satisfied},
              {"derived_from", derived}};
}

json match_json(const MatchResult& m) {
  json neighbors = json::array();
  for (const auto& n : m.neighbors) neighbors.push_back(json{{"id", n.id}, {"score", n.score}});
  return json{{"query_id", m.query_id}, {"metric", metric_name(m.metric)}, {"neighbors", neighbors}};
}

json shots_json(const std::vector<Shot>& shots) {
  json out = json::array();
  for (const Shot& s : shots)
    out.push_back(json{{"start", s.start_frame}, {"end", s.end_frame}, {"keyframe", s.keyframe}});
  return out;
}

json report_json(const PipelineReport& r) {
  json batches = json::array();
  for (const auto& [size, trigger] : r.batches)
    batches.push_back(json{{"size", size}, {"trigger", trigger_name(trigger)}});
  json out{{"frames", r.frames},
           {"shots", shots_json(r.shots)},
           {"requests_submitted", r.requests_submitted},
           {"batches", batches},
           {"features_indexed", r.features_indexed},
           {"wall_ms", r.wall_ms}};
  if (r.matches.has_value()) out["matches"] = match_json(*r.matches);
  return out;
}

json status_json(const StatusSnapshotMsg& snap) {
  json workers = json::object();
  for (const auto& e : snap.workers) {
    json w{{"timestamp", e.status.timestamp},
           {"cpu_pct", e.status.cpu_pct},
           {"mem_bytes", e.status.mem_bytes},
           {"queue_depths", e.status.queue_depths},
           {"inflight", e.status.inflight},
           {"stale", e.stale}};
    if (e.status.device_util_pct.has_value())
      w["device_util_pct"] = *e.status.device_util_pct;
    else
      w["device_util_pct"] = nullptr;
    workers[e.status.worker_id] = std::move(w);
  }
  return json{{"taken_at", snap.taken_at}, {"drops", snap.drops}, {"workers", workers}};
}

std::vector<uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.is_open()) raise(Errc::io_error, "cannot open " + path.string());
  return std::vector<uint8_t>((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
}

std::vector<uint32_t> parse_batches(const std::string& csv) {
  std::vector<uint32_t> out;
  std::istringstream is(csv);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    try {
      out.push_back(static_cast<uint32_t>(std::stoul(tok)));
    } catch (const std::exception&) {
      raise(Errc::invalid_argument, "bad batch size: " + tok);
    }
  }
  if (out.empty()) raise(Errc::invalid_argument, "no batch sizes given");
  return out;
}

volatile std::sig_atomic_t g_stop_requested = 0;
void on_signal(int) { g_stop_requested = 1; }

struct SynthFlags {
  float a_ms = 8.0f;
  float s_ms = 0.5f;
  float q_ms = 0.05f;
  float jitter = 0.0f;

  SyntheticLatencyParams params() const { return {a_ms, s_ms, q_ms, jitter}; }
};

void add_synth_flags(CLI::App* cmd, SynthFlags& f) {
  cmd->add_option("--a-ms", f.a_ms, "synthetic executor fixed cost (ms)");
  cmd->add_option("--s-ms", f.s_ms, "synthetic executor per-item cost (ms)");
  cmd->add_option("--q-ms", f.q_ms, "synthetic executor quadratic cost (ms)");
  cmd->add_option("--jitter", f.jitter, "synthetic executor jitter fraction [0,0.5]");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"v2r: video-to-retail serving kernel"};
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--seed", g.seed, "seed for every random artifact");
  app.add_flag("--json", g.json_only, "suppress human-readable notes on stderr");

  // ---- model register / list ----
  auto* model = app.add_subcommand("model", "model repository operations");
  model->require_subcommand(1);

  std::string root = "registry";
  std::string model_id, model_name = "unnamed", task = "embedding";
  std::string input_spec = "u8:batch,64,64,3", output_spec = "f32:128";
  std::string weights_path;
  auto* reg_cmd = model->add_subcommand("register", "register a model version");
  reg_cmd->add_option("--root", root, "registry root directory");
  reg_cmd->add_option("--id", model_id, "model id ([a-z0-9_-]{1,64})")->required();
  reg_cmd->add_option("--name", model_name, "display name");
  reg_cmd->add_option("--task", task, "embedding|detection|classification|synthetic");
  reg_cmd->add_option("--input-spec", input_spec, "e.g. u8:batch,64,64,3");
  reg_cmd->add_option("--output-spec", output_spec, "e.g. f32:128");
  reg_cmd->add_option("--weights", weights_path, "weight blob file");

  auto* list_cmd = model->add_subcommand("list", "list live model versions");
  list_cmd->add_option("--root", root, "registry root directory");

  // ---- profile ----
  auto* profile_cmd = app.add_subcommand("profile", "measure latency/throughput per batch size");
  std::string batches_csv = "1,2,4,8,16,32,64";
  uint32_t iters = 30, warmup = 3;
  std::string out_path = "profile.jsonl", cache_path, device_tag = "cpu-local";
  SynthFlags profile_synth;
  profile_cmd->add_option("--root", root, "registry root directory");
  profile_cmd->add_option("--model", model_id, "model id")->required();
  profile_cmd->add_option("--batches", batches_csv, "comma-separated batch sizes");
  profile_cmd->add_option("--iters", iters, "timed iterations per batch size (>=5)");
  profile_cmd->add_option("--warmup", warmup, "discarded warmup runs");
  profile_cmd->add_option("--out", out_path, "profile records file (JSON lines)");
  profile_cmd->add_option("--cache", cache_path, "orchestrator cache file to push into");
  profile_cmd->add_option("--device", device_tag, "device tag");
  add_synth_flags(profile_cmd, profile_synth);

  // ---- plan ----
  auto* plan_cmd = app.add_subcommand("plan", "compute the SLO-constrained batch plan");
  float slo_ms = 50.0f;
  std::string percentile = "p95";
  cache_path = "profiles.jsonl";
  plan_cmd->add_option("--cache", cache_path, "profile cache file");
  plan_cmd->add_option("--model", model_id, "model id")->required();
  plan_cmd->add_option("--slo-ms", slo_ms, "latency SLO in ms");
  plan_cmd->add_option("--percentile", percentile, "p50|p95|p99");
  plan_cmd->add_option("--device", device_tag, "device tag");

  // ---- serve ----
  auto* serve_cmd = app.add_subcommand("serve", "run the model server");
  std::string bind = "127.0.0.1:7878", models_csv, sink_path, index_out;
  uint32_t workers = 0;
  bool self_report = true;
  SynthFlags serve_synth;
  serve_cmd->add_option("--bind", bind, "host:port (port 0 = ephemeral)");
  serve_cmd->add_option("--models", models_csv, "comma-separated model ids")->required();
  serve_cmd->add_option("--root", root, "registry root directory");
  serve_cmd->add_option("--sink", sink_path, "HYFV feature sink file");
  serve_cmd->add_option("--index-out", index_out, "save the ingest index here on shutdown");
  serve_cmd->add_option("--workers", workers, "worker threads (0 = cores)");
  serve_cmd->add_flag("--self-report,!--no-self-report", self_report,
                      "publish own worker status at 1 Hz");
  add_synth_flags(serve_cmd, serve_synth);

  // ---- ingest ----
  auto* ingest_cmd = app.add_subcommand("ingest", "read a stream and report shots");
  std::string stream_path;
  float threshold = 0.35f;
  uint32_t min_shot_len = 2;
  ingest_cmd->add_option("--stream", stream_path, "HYF stream file")->required();
  ingest_cmd->add_option("--model", model_id, "model id (validated against the registry)");
  ingest_cmd->add_option("--root", root, "registry root directory");
  ingest_cmd->add_option("--threshold", threshold, "shot boundary threshold (0,2]");
  ingest_cmd->add_option("--min-shot-len", min_shot_len, "minimum frames per shot");

  // ---- match ----
  auto* match_cmd = app.add_subcommand("match", "exact top-k search over an index");
  std::string index_path, query_path;
  uint32_t k = 10, threads = 1;
  match_cmd->add_option("--index", index_path, "HYIX index file")->required();
  match_cmd->add_option("--query-file", query_path, "HYFV file of query vectors")->required();
  match_cmd->add_option("--k", k, "neighbors per query");
  match_cmd->add_option("--threads", threads, "scan threads (0 = cores)");

  // ---- status ----
  auto* status_cmd = app.add_subcommand("status", "query a master's cluster snapshot");
  std::string master = "127.0.0.1:7878";
  uint32_t ttl_ms = 3000;
  status_cmd->add_option("--master", master, "master host:port");
  status_cmd->add_option("--ttl-ms", ttl_ms, "staleness TTL in ms");

  // ---- pipeline ----
  auto* pipeline_cmd = app.add_subcommand("pipeline", "end-to-end ingest->batch->infer->match");
  bool in_process = false, query_mode = false, all_frames = false;
  std::string connect, pipe_index, pipe_sink;
  uint32_t batch_size = 8, query_frame = 0;
  float deadline_ms = 50.0f;
  std::string pipe_cache;
  SynthFlags pipe_synth;
  pipeline_cmd->add_option("--stream", stream_path, "HYF stream file")->required();
  pipeline_cmd->add_option("--model", model_id, "model id")->required();
  pipeline_cmd->add_option("--root", root, "registry root directory");
  pipeline_cmd->add_flag("--in-process", in_process, "execute locally, no sockets");
  pipeline_cmd->add_option("--connect", connect, "send batches to host:port instead");
  pipeline_cmd->add_option("--threshold", threshold, "shot boundary threshold");
  pipeline_cmd->add_option("--min-shot-len", min_shot_len, "minimum frames per shot");
  pipeline_cmd->add_flag("--all-frames", all_frames, "infer every frame, not just keyframes");
  pipeline_cmd->add_option("--batch-size", batch_size, "fixed batch size");
  pipeline_cmd->add_option("--cache", pipe_cache, "derive batch size from this profile cache");
  pipeline_cmd->add_option("--slo-ms", slo_ms, "SLO for --cache planning");
  pipeline_cmd->add_option("--percentile", percentile, "p50|p95|p99 for --cache planning");
  pipeline_cmd->add_option("--deadline-ms", deadline_ms, "request queueing deadline");
  pipeline_cmd->add_option("--index", pipe_index, "index file (written, or read with --query)");
  pipeline_cmd->add_option("--sink", pipe_sink, "HYFV sink file (index mode)");
  pipeline_cmd->add_flag("--query", query_mode, "query mode: search --index");
  pipeline_cmd->add_option("--query-frame", query_frame, "frame to query with");
  pipeline_cmd->add_option("--k", k, "neighbors to return");
  pipeline_cmd->add_option("--threads", threads, "search threads");
  add_synth_flags(pipeline_cmd, pipe_synth);

  // ---- bench ----
  auto* bench_cmd = app.add_subcommand("bench", "measurement suites");
  bench_cmd->require_subcommand(1);
  uint32_t bench_frames = 500, bench_w = 320, bench_h = 180;
  auto* bench_decode_cmd = bench_cmd->add_subcommand("decode", "raw scan + histogram throughput");
  bench_decode_cmd->add_option("--frames", bench_frames, "frame count");
  bench_decode_cmd->add_option("--width", bench_w, "frame width");
  bench_decode_cmd->add_option("--height", bench_h, "frame height");

  uint32_t kf_frames = 3000, kf_shots = 30, kf_w = 64, kf_h = 64, kf_batch = 8;
  SynthFlags kf_synth;
  auto* bench_kf_cmd = bench_cmd->add_subcommand("keyframe", "keyframe vs all-frames pipeline");
  bench_kf_cmd->add_option("--frames", kf_frames, "frame count");
  bench_kf_cmd->add_option("--shots", kf_shots, "uniform shot count");
  bench_kf_cmd->add_option("--width", kf_w, "frame width");
  bench_kf_cmd->add_option("--height", kf_h, "frame height");
  bench_kf_cmd->add_option("--batch-size", kf_batch, "batch size");
  add_synth_flags(bench_kf_cmd, kf_synth);

  uint32_t bc_min = 1, bc_max = 32, bc_iters = 8, bc_warmup = 1;
  SynthFlags bc_synth;
  auto* bench_bc_cmd = bench_cmd->add_subcommand("batchcurve", "latency/throughput vs batch size");
  bench_bc_cmd->add_option("--batch-min", bc_min, "smallest batch");
  bench_bc_cmd->add_option("--batch-max", bc_max, "largest batch");
  bench_bc_cmd->add_option("--iters", bc_iters, "iterations per batch size (>=5)");
  bench_bc_cmd->add_option("--warmup", bc_warmup, "warmup runs");
  add_synth_flags(bench_bc_cmd, bc_synth);

  uint32_t mt_n = 100000, mt_dim = 128, mt_k = 10, mt_queries = 50, mt_threads = 0;
  bool mt_verify = false;
  auto* bench_mt_cmd = bench_cmd->add_subcommand("match", "top-k search latency");
  bench_mt_cmd->add_option("--n", mt_n, "index size");
  bench_mt_cmd->add_option("--dim", mt_dim, "vector dimension");
  bench_mt_cmd->add_option("--k", mt_k, "neighbors");
  bench_mt_cmd->add_option("--queries", mt_queries, "query count");
  bench_mt_cmd->add_option("--threads", mt_threads, "pool threads (0 = cores)");
  bench_mt_cmd->add_flag("--verify", mt_verify, "check against the brute-force oracle");

  // ---- synth ----
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic HYF fixture");
  std::string synth_out = "stream.hyf", pattern = "shots";
  uint32_t sy_frames = 90, sy_shots = 3, sy_w = 64, sy_h = 64;
  synth_cmd->add_option("--out", synth_out, "output file")->required();
  synth_cmd->add_option("--pattern", pattern, "shots|random");
  synth_cmd->add_option("--frames", sy_frames, "frame count");
  synth_cmd->add_option("--shots", sy_shots, "shot count (pattern=shots)");
  synth_cmd->add_option("--width", sy_w, "frame width");
  synth_cmd->add_option("--height", sy_h, "frame height");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
      return app.exit(e);
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (reg_cmd->parsed()) {
      ModelRegistry registry(root);
      ModelManifest m;
      m.model_id = model_id;
      m.name = model_name;
      m.task = task_from_name(task);
      m.input_spec = TensorSpec::parse(input_spec);
      m.output_spec = TensorSpec::parse(output_spec);
      std::optional<std::vector<uint8_t>> weights;
      if (!weights_path.empty()) weights = read_file(weights_path);
      auto registered = registry.register_model(
          m, weights.has_value() ? std::optional<std::span<const uint8_t>>(*weights)
                                 : std::nullopt);
      std::cout << manifest_json(registered).dump(2) << "\n";
      note(g, "registered " + registered.model_id + " v" + std::to_string(registered.version));
    } else if (list_cmd->parsed()) {
      ModelRegistry registry(root);
      json out = json::array();
      for (const auto& m : registry.list()) out.push_back(manifest_json(m));
      std::cout << out.dump(2) << "\n";
    } else if (profile_cmd->parsed()) {
      ModelRegistry registry(root);
      auto manifest = registry.get_model(model_id);
      auto executor = make_executor(manifest, g.seed, profile_synth.params());

      ProfileOptions opts;
      opts.batch_sizes = parse_batches(batches_csv);
      opts.iterations = iters;
      opts.warmup = warmup;
      opts.device_tag = device_tag;
      opts.seed = g.seed;

      std::optional<ProfileCache> cache;
      if (!cache_path.empty()) cache.emplace(cache_path);
      auto result =
          profile_model(model_id, *executor, opts, cache.has_value() ? &*cache : nullptr);

      std::ofstream out(out_path, std::ios::trunc);
      if (!out.is_open()) raise(Errc::io_error, "cannot write " + out_path);
      for (const auto& rec : result.records) out << record_json(rec).dump() << "\n";

      json summary{{"model_id", model_id},
                   {"records", result.records.size()},
                   {"out", out_path}};
      if (result.error.has_value()) summary["error"] = *result.error;
      std::cout << summary.dump(2) << "\n";
      if (result.error.has_value()) return exit_code(Errc::executor_failure);
    } else if (plan_cmd->parsed()) {
      ProfileCache cache((std::filesystem::path(cache_path)));
      SloPolicy policy{model_id, slo_ms, pctl_from_name(percentile)};
      BatchPlan plan = plan_batch(cache, model_id, policy, device_tag);
      std::cout << plan_json(plan).dump(2) << "\n";
    } else if (serve_cmd->parsed()) {
      ModelRegistry registry(root);
      auto [host, port] = parse_host_port(bind);
      std::map<std::string, std::shared_ptr<Executor>> executors;
      uint32_t feature_dim = 0;
      std::istringstream is(models_csv);
      std::string id;
      while (std::getline(is, id, ',')) {
        auto manifest = registry.get_model(id);
        auto ex = make_executor(manifest, g.seed, serve_synth.params());
        if (ex->feature_dim() > 0) {
          if (feature_dim != 0 && feature_dim != ex->feature_dim())
            raise(Errc::invalid_argument, "sink requires one feature dim across models");
          feature_dim = ex->feature_dim();
        }
        executors[id] = std::move(ex);
      }
      if (executors.empty()) raise(Errc::invalid_argument, "no models given");

      std::shared_ptr<FeatureSink> sink;
      std::shared_ptr<FlatIndex> ingest_index;
      if (!sink_path.empty() || !index_out.empty()) {
        if (feature_dim == 0) raise(Errc::invalid_argument, "no feature-emitting model for sink");
        if (!index_out.empty()) ingest_index = std::make_shared<FlatIndex>(feature_dim, Metric::cosine);
        sink = std::make_shared<FeatureSink>(
            sink_path.empty() ? std::nullopt
                              : std::optional<std::filesystem::path>(sink_path),
            feature_dim, ingest_index);
      }

      ServerConfig cfg;
      cfg.host = host;
      cfg.port = port;
      cfg.worker_threads = workers;
      cfg.self_report = self_report;
      cfg.worker_id = bind;
      ModelServer server(cfg, std::move(executors), sink);
      server.start();
      note(g, "serving on " + host + ":" + std::to_string(server.bound_port()));
      std::cout << json{{"bound", host + ":" + std::to_string(server.bound_port())}}.dump()
                << "\n"
                << std::flush;

      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      while (g_stop_requested == 0) std::this_thread::sleep_for(std::chrono::milliseconds(50));
      note(g, "stopping");
      server.stop();
      if (ingest_index != nullptr && !index_out.empty()) ingest_index->save(index_out);
    } else if (ingest_cmd->parsed()) {
      if (!model_id.empty()) ModelRegistry(root).get_model(model_id);  // must resolve
      FrameStream stream = read_stream(stream_path);
      auto shots = detect_shots(stream, threshold, min_shot_len);
      json out{{"frames", stream.frame_count},
               {"width", stream.width},
               {"height", stream.height},
               {"channels", stream.channels},
               {"shots", shots_json(shots)},
               {"keyframes", shots.size()}};
      std::cout << out.dump(2) << "\n";
    } else if (match_cmd->parsed()) {
      FlatIndex index = FlatIndex::load(index_path);
      auto queries = read_feature_file(query_path);
      json results = json::array();
      for (const auto& q : queries) results.push_back(match_json(index.search(q, k, threads)));
      std::cout << results.dump(2) << "\n";
    } else if (status_cmd->parsed()) {
      auto [host, port] = parse_host_port(master);
      FrameClient client(host, port);
      Frame f;
      f.type = MsgType::status_query;
      f.correlation_id = 1;
      f.body = encode_status_query({ttl_ms});
      client.send(f);
      Frame reply = client.recv();
      if (reply.type == MsgType::error)
        raise(Errc::io_error, "master replied: " + decode_error(reply.body).message);
      std::cout << status_json(decode_status_snapshot(reply.body)).dump(2) << "\n";
    } else if (pipeline_cmd->parsed()) {
      if (!in_process && connect.empty())
        raise(Errc::invalid_argument, "pipeline needs --in-process or --connect");
      ModelRegistry registry(root);
      auto manifest = registry.get_model(model_id);

      PipelineOptions opts;
      opts.stream_path = stream_path;
      opts.model_id = model_id;
      opts.executor = make_executor(manifest, g.seed, pipe_synth.params());
      opts.threshold = threshold;
      opts.min_shot_len = min_shot_len;
      opts.all_frames = all_frames;
      opts.deadline_ms = deadline_ms;
      opts.k = k;
      opts.search_threads = threads;
      if (!connect.empty()) opts.connect = connect;

      if (!pipe_cache.empty()) {
        ProfileCache cache((std::filesystem::path(pipe_cache)));
        SloPolicy policy{model_id, slo_ms, pctl_from_name(percentile)};
        BatchPlan plan = plan_batch(cache, model_id, policy, device_tag);
        opts.batch_size = plan.batch_size;
        note(g, "planned batch size " + std::to_string(plan.batch_size) +
                    (plan.slo_satisfied ? "" : " (SLO not satisfiable)"));
      } else {
        opts.batch_size = batch_size;
      }

      if (query_mode) {
        opts.query_mode = true;
        if (pipe_index.empty()) raise(Errc::invalid_argument, "--query needs --index");
        opts.index_in = pipe_index;
        opts.query_frame = query_frame;
      } else {
        if (!pipe_index.empty()) opts.index_out = pipe_index;
        if (!pipe_sink.empty()) opts.sink_out = pipe_sink;
      }

      PipelineReport report = run_pipeline(opts);
      std::cout << report_json(report).dump(2) << "\n";
    } else if (bench_decode_cmd->parsed()) {
      auto r = bench_decode(bench_frames, bench_w, bench_h, g.seed);
      std::cout << json{{"suite", "decode"},   {"frames", r.frames}, {"width", r.width},
                        {"height", r.height},  {"read_ms", r.read_ms}, {"hist_ms", r.hist_ms},
                        {"fps", r.fps}}
                       .dump(2)
                << "\n";
    } else if (bench_kf_cmd->parsed()) {
      auto r = bench_keyframe(kf_frames, kf_shots, kf_w, kf_h, kf_synth.params(), kf_batch, g.seed);
      std::cout << json{{"suite", "keyframe"},
                        {"frames", r.frames},
                        {"shots_detected", r.shots_detected},
                        {"keyframe_requests", r.keyframe_requests},
                        {"allframes_requests", r.allframes_requests},
                        {"keyframe_wall_ms", r.keyframe_wall_ms},
                        {"allframes_wall_ms", r.allframes_wall_ms},
                        {"speedup", r.speedup}}
                       .dump(2)
                << "\n";
    } else if (bench_bc_cmd->parsed()) {
      auto r = bench_batchcurve(bc_synth.params(), bc_min, bc_max, bc_warmup, bc_iters, g.seed);
      json points = json::array();
      for (const auto& p : r.points)
        points.push_back(json{{"batch", p.batch_size},
                              {"lat_mean_ms", p.lat_mean_ms},
                              {"lat_p95_ms", p.lat_p95_ms},
                              {"throughput_ips", p.throughput_ips}});
      std::cout << json{{"suite", "batchcurve"}, {"points", points}, {"peak_batch", r.peak_batch}}
                       .dump(2)
                << "\n";
    } else if (bench_mt_cmd->parsed()) {
      auto r = bench_match(mt_n, mt_dim, mt_k, mt_queries, mt_verify, mt_threads, g.seed);
      json out{{"suite", "match"},
               {"n", r.n},
               {"dim", r.dim},
               {"k", r.k},
               {"queries", r.queries},
               {"single_thread_ms_per_query", r.single_thread_ms_per_query},
               {"pooled_ms_per_query", r.pooled_ms_per_query},
               {"pool_threads", r.pool_threads}};
      if (r.oracle_agreement.has_value()) out["oracle_agreement"] = *r.oracle_agreement;
      std::cout << out.dump(2) << "\n";
    } else if (synth_cmd->parsed()) {
      FrameStream stream = pattern == "random"
                               ? make_random_stream(sy_frames, sy_w, sy_h, g.seed)
                               : make_shot_stream(sy_frames, sy_shots, sy_w, sy_h, g.seed);
      write_stream(synth_out, stream);
      std::cout << json{{"out", synth_out},
                        {"frames", stream.frame_count},
                        {"bytes", stream.payload.size() + 28}}
                       .dump(2)
                << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << errc_name(e.code()) << ": " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
