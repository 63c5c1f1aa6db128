// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exit code = number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "support/temp_dir.hpp"
#include "v2r/batch_queue.hpp"
#include "v2r/bench.hpp"
#include "v2r/monitor.hpp"
#include "v2r/orchestrator.hpp"
#include "v2r/pipeline.hpp"
#include "v2r/protocol.hpp"
#include "v2r/rng.hpp"
#include "v2r/server.hpp"
#include "v2r/synth.hpp"

using namespace v2r;
using v2r::test::TempDir;

namespace {

struct Criterion {
  int id;
  const char* name;
  std::function<std::string()> run;  // returns detail text; throws on failure
};

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

template <typename T>
std::string str(T v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// ---- criterion 1: matching latency + exactness ----
std::string c1_matching_latency() {
  auto r = bench_match(100000, 128, 10, 50, /*verify=*/true, /*pool_threads=*/0, /*seed=*/42);
  require(r.oracle_agreement.has_value() && *r.oracle_agreement == 1.0,
          "oracle agreement " + str(r.oracle_agreement.value_or(-1)) + " != 1.0");
  require(r.single_thread_ms_per_query <= 50.0,
          "single-thread " + str(r.single_thread_ms_per_query) + " ms > 50 ms");
  require(r.pooled_ms_per_query <= 15.0, "pooled " + str(r.pooled_ms_per_query) + " ms > 15 ms");
  return str(r.single_thread_ms_per_query) + " ms single, " + str(r.pooled_ms_per_query) +
         " ms pooled (" + str(r.pool_threads) + " threads), 50/50 queries exact";
}

// ---- criterion 2: batch-size tradeoff shape ----
std::string c2_batchcurve() {
  auto r = bench_batchcurve({8.0f, 0.5f, 0.05f, 0.0f}, 1, 32, /*warmup=*/1, /*iterations=*/6, 42);
  require(r.points.size() == 32, "expected 32 profiled batch sizes");
  for (size_t i = 1; i < r.points.size(); ++i)
    require(r.points[i].lat_mean_ms >= r.points[i - 1].lat_mean_ms,
            "latency not non-decreasing at b=" + str(r.points[i].batch_size));
  require(r.peak_batch >= 11 && r.peak_batch <= 15,
          "throughput peak at b=" + str(r.peak_batch) + ", want 13 +/- 2");
  return "latency non-decreasing over b=1..32, throughput peak at b=" + str(r.peak_batch);
}

// ---- criterion 3: keyframe speedup ----
std::string c3_keyframe() {
  auto r = bench_keyframe(3000, 30, 64, 64, {8.0f, 0.5f, 0.05f, 0.0f}, /*batch=*/8, 42);
  require(r.shots_detected == 30, "detected " + str(r.shots_detected) + " shots, want 30");
  require(r.keyframe_requests == 30, str(r.keyframe_requests) + " keyframe requests, want 30");
  require(r.allframes_requests == 3000, str(r.allframes_requests) + " all-frame requests, want 3000");
  require(r.speedup >= 10.0, "speedup " + str(r.speedup) + "x < 10x");
  return "30 vs 3000 requests, " + str(r.speedup) + "x wall-time speedup";
}

// ---- criterion 4: raw scan throughput ----
std::string c4_decode() {
  auto r = bench_decode(500, 320, 180, 42);
  require(r.fps >= 2000.0, str(r.fps) + " fps < 2000 fps");
  return str(r.fps) + " fps over " + str(r.frames) + " frames (read " + str(r.read_ms) +
         " ms, hist " + str(r.hist_ms) + " ms)";
}

// ---- criterion 5: orchestrator optimality ----
std::string c5_orchestrator() {
  SplitMix64 g(20240);
  int fallbacks = 0;
  const int kTrials = 150;
  for (int trial = 0; trial < kTrials; ++trial) {
    ProfileCache cache;
    std::vector<ProfileRecord> rows;
    uint32_t nrows = 5 + static_cast<uint32_t>(g.next_below(16));
    uint32_t batch = 0;
    for (uint32_t i = 0; i < nrows; ++i) {
      batch += 1 + static_cast<uint32_t>(g.next_below(8));
      ProfileRecord rec;
      rec.model_id = "m";
      rec.device_tag = "cpu-local";
      rec.batch_size = batch;
      float p95 = 1.0f + static_cast<float>(g.next_unit() * 200.0);
      rec.lat_p50_ms = p95 * 0.8f;
      rec.lat_p95_ms = p95;
      rec.lat_p99_ms = p95 * 1.2f;
      rec.throughput_ips = 10.0f + static_cast<float>(g.next_unit() * 400.0);
      rec.lat_mean_ms = static_cast<float>(rec.batch_size) / rec.throughput_ips * 1000.0f;
      rec.iterations = 30;
      rec.measured_at = 1000 + i;
      cache.put(rec);
      rows.push_back(rec);
    }
    // every third trial forces the no-feasible fallback
    float slo = trial % 3 == 0 ? 0.25f : 1.0f + static_cast<float>(g.next_unit() * 150.0);
    SloPolicy policy{"m", slo, Pctl::p95};
    BatchPlan got = plan_batch(cache, "m", policy, "cpu-local");

    // exhaustive scan
    const ProfileRecord* best = nullptr;
    for (const auto& r : rows) {
      if (r.lat_p95_ms > slo) continue;
      if (best == nullptr || r.throughput_ips > best->throughput_ips ||
          (r.throughput_ips == best->throughput_ips && r.batch_size < best->batch_size))
        best = &r;
    }
    bool feasible = best != nullptr;
    if (!feasible) {
      ++fallbacks;
      for (const auto& r : rows)
        if (best == nullptr || r.batch_size < best->batch_size) best = &r;
    }
    require(got.batch_size == best->batch_size,
            "trial " + str(trial) + ": plan b=" + str(got.batch_size) + ", oracle b=" +
                str(best->batch_size));
    require(got.slo_satisfied == feasible, "trial " + str(trial) + ": slo flag mismatch");
  }
  require(fallbacks > 0, "no fallback cases were generated");
  return str(kTrials) + "/" + str(kTrials) + " tables match the exhaustive oracle (" +
         str(fallbacks) + " forced fallbacks)";
}

// ---- criterion 6: batching contract under a mock clock ----
std::string c6_batching() {
  ManualClock clock;
  BatchingEngine engine(&clock);
  engine.open_queue("m", TensorSpec::scalar_batch(Dtype::f32), 8);

  struct Emitted {
    InferenceBatch batch;
    uint32_t plan_at_emit;
  };
  std::vector<Emitted> emitted;
  uint32_t current_plan = 8;
  auto collect = [&](std::vector<InferenceBatch> batches) {
    for (auto& b : batches) emitted.push_back({std::move(b), current_plan});
  };
  uint64_t next_id = 1;
  auto submit = [&](int n) {
    for (int i = 0; i < n; ++i) {
      InferenceRequest req;
      req.request_id = next_id++;
      req.model_id = "m";
      req.payload = Tensor::zeros(Dtype::f32, {1});
      req.deadline_ms = 20.0f;
      collect(engine.submit(std::move(req)));
    }
  };

  submit(8);                        // size batch at plan 8
  submit(5);                        // queued
  clock.advance(10.0);
  collect(engine.tick());           // nothing due yet
  submit(3);                        // total 8 queued -> size batch
  current_plan = 4;
  engine.set_batch_size("m", 4);    // plan switch 8 -> 4 mid-stream
  submit(10);                       // two size batches of 4, 2 queued
  clock.advance(20.0);
  collect(engine.tick());           // deadline flushes the remaining 2
  submit(3);
  clock.advance(19.0);
  collect(engine.tick());           // not due (19 < 20)
  clock.advance(1.0);
  collect(engine.tick());           // due exactly at the deadline
  collect(engine.drain("m"));

  require(!emitted.empty(), "no batches emitted");
  uint64_t last_id = 0;
  uint32_t timeout_batches = 0;
  for (const auto& e : emitted) {
    require(e.batch.requests.size() >= 1 && e.batch.requests.size() <= e.plan_at_emit,
            "batch of " + str(e.batch.requests.size()) + " exceeds plan " + str(e.plan_at_emit));
    for (const auto& r : e.batch.requests) {
      require(r.request_id == last_id + 1, "FIFO order broken");
      last_id = r.request_id;
      double wait = e.batch.formed_at - r.enqueued_at;
      require(wait <= r.deadline_ms + 0.0, "deadline violated by " + str(wait - r.deadline_ms) + " ms");
    }
    if (e.batch.trigger == BatchTrigger::timeout) ++timeout_batches;
  }
  require(last_id == next_id - 1, "some requests never emitted");
  require(timeout_batches >= 2, "expected timeout-triggered batches in the trace");
  return str(emitted.size()) + " batches, zero over-size, zero deadline violations, FIFO intact";
}

// ---- criterion 7: protocol round-trip + truncation mutants ----
std::string c7_protocol() {
  SplitMix64 g(777);
  auto random_label = [&](size_t cap) {
    std::string s;
    size_t len = g.next_below(cap + 1);
    for (size_t i = 0; i < len; ++i) s.push_back(static_cast<char>('a' + g.next_below(26)));
    return s;
  };
  auto random_tensor = [&] {
    Tensor t;
    t.dtype = g.next_below(2) == 0 ? Dtype::f32 : Dtype::u8;
    size_t rank = 1 + g.next_below(3);
    size_t elems = 1;
    for (size_t i = 0; i < rank; ++i) {
      uint32_t d = 1 + static_cast<uint32_t>(g.next_below(5));
      t.dims.push_back(d);
      elems *= d;
    }
    t.data.resize(elems * dtype_size(t.dtype));
    for (auto& b : t.data) b = static_cast<uint8_t>(g.next());
    if (t.dtype == Dtype::f32)
      for (auto& v : t.f32()) v = g.next_signed_unit();
    return t;
  };
  auto random_request = [&] {
    InferRequestMsg m;
    m.model_id = random_label(8) + "m";
    size_t n = g.next_below(5);
    for (size_t i = 0; i < n; ++i) m.items.push_back({g.next(), random_tensor()});
    return m;
  };
  auto random_response = [&] {
    InferResponseMsg m;
    size_t n = g.next_below(4);
    for (size_t i = 0; i < n; ++i) {
      ExecutorOutput o;
      o.request_id = g.next();
      size_t preds = g.next_below(3);
      for (size_t p = 0; p < preds; ++p)
        o.predictions.push_back({random_label(6), static_cast<float>(g.next_unit())});
      if (g.next_below(2) == 0) {
        FeatureVector f;
        f.id = o.request_id;
        f.values.resize(1 + g.next_below(12));
        for (auto& v : f.values) v = g.next_signed_unit();
        o.feature = std::move(f);
      }
      m.outputs.push_back(std::move(o));
    }
    return m;
  };
  auto random_status = [&] {
    WorkerStatus s;
    s.worker_id = random_label(8) + "w";
    s.timestamp = g.next();
    s.cpu_pct = static_cast<float>(g.next_unit() * 100.0);
    s.mem_bytes = g.next();
    size_t nq = g.next_below(3);
    for (size_t i = 0; i < nq; ++i)
      s.queue_depths[random_label(5) + str(i)] = static_cast<uint32_t>(g.next_below(64));
    if (g.next_below(2) == 0) s.device_util_pct = static_cast<float>(g.next_unit() * 100.0);
    return s;
  };

  int round_trips = 0;
  for (int i = 0; i < 334; ++i) {
    auto m = random_request();
    require(decode_infer_request(encode_infer_request(m)) == m, "request round trip diverged");
    ++round_trips;
  }
  for (int i = 0; i < 333; ++i) {
    auto m = random_response();
    require(decode_infer_response(encode_infer_response(m)) == m, "response round trip diverged");
    ++round_trips;
  }
  for (int i = 0; i < 333; ++i) {
    auto s = random_status();
    require(decode_status_publish(encode_status_publish(s)) == s, "status round trip diverged");
    ++round_trips;
  }

  int mutants = 0;
  int rejected = 0;
  while (mutants < 100) {
    int kind = mutants % 3;
    std::vector<uint8_t> body;
    if (kind == 0) body = encode_infer_request(random_request());
    if (kind == 1) body = encode_infer_response(random_response());
    if (kind == 2) body = encode_status_publish(random_status());
    if (body.size() < 2) continue;
    ++mutants;
    std::vector<uint8_t> cut(body.begin(), body.begin() + 1 + g.next_below(body.size() - 1));
    try {
      if (kind == 0) decode_infer_request(cut);
      if (kind == 1) decode_infer_response(cut);
      if (kind == 2) decode_status_publish(cut);
      // a prefix that still parses as a complete body is not a failure mode
    } catch (const Error& e) {
      require(e.code() == Errc::malformed_body,
              std::string("truncation raised ") + errc_name(e.code()));
      ++rejected;
    } catch (...) {
      require(false, "truncation escaped the MalformedBody contract");
    }
  }
  require(rejected >= 90, "only " + str(rejected) + "/100 mutants rejected");
  return str(round_trips) + " round trips exact, " + str(rejected) +
         "/100 truncation mutants raised MalformedBody, no process failure";
}

// ---- criterion 8: end-to-end self-match ----
std::string c8_selfmatch() {
  TempDir dir;
  FrameStream stream = make_shot_stream(90, 3, 32, 32, 42);

  PipelineOptions opts;
  opts.stream = stream;
  opts.model_id = "prod-emb";
  opts.executor = std::make_shared<HistogramEmbeddingExecutor>(42, 128, 32, 32);
  opts.index_out = dir.file("p.hyix");

  PipelineReport indexed = run_pipeline(opts);
  require(indexed.shots.size() == 3, "expected 3 shots, got " + str(indexed.shots.size()));
  require(indexed.features_indexed == 3, "expected 3 features indexed");

  PipelineOptions q = opts;
  q.index_out.reset();
  q.query_mode = true;
  q.index_in = dir.file("p.hyix");
  q.query_frame = 45;  // inside shot 2, not its keyframe
  q.k = 3;
  PipelineReport queried = run_pipeline(q);
  require(queried.matches.has_value(), "query returned no matches");
  const auto& neighbors = queried.matches->neighbors;
  require(!neighbors.empty(), "no neighbors");
  require(neighbors[0].id == 30, "rank 1 is id " + str(neighbors[0].id) + ", want keyframe 30");
  require(neighbors[0].score >= 0.99f, "rank-1 score " + str(neighbors[0].score) + " < 0.99");
  return "shot 2's feature at rank 1 with cosine score " + str(neighbors[0].score);
}

// ---- criterion 9: monitor staleness + ingest rate ----
std::string c9_monitor() {
  // exact stale flags on the mixed-freshness fixture
  StatusTable table;
  auto mk = [](const std::string& id, uint64_t ts) {
    WorkerStatus s;
    s.worker_id = id;
    s.timestamp = ts;
    s.cpu_pct = 5.0f;
    s.mem_bytes = 1024;
    return s;
  };
  table.publish(mk("a", 10000));
  table.publish(mk("b", 12000));
  table.publish(mk("c", 14900));
  auto snap = table.snapshot(3000, 15000);
  require(snap.workers.at("a").stale, "worker a should be stale");
  require(!snap.workers.at("b").stale, "worker b should be fresh");
  require(!snap.workers.at("c").stale, "worker c should be fresh");

  // ingest load over the wire
  ServerConfig cfg;
  cfg.port = 0;
  cfg.worker_threads = 1;
  ModelServer server(cfg, {});
  server.start();
  double rate = 0.0;
  uint64_t drops = 1;
  {
    FrameClient client("127.0.0.1", server.bound_port());
    const int kCount = 30000;
    uint64_t base = utc_now_ms();
    // batched load generator; the master parses and applies every frame
    std::vector<uint8_t> wire;
    for (int i = 0; i < kCount; ++i) {
      WorkerStatus s = mk("w" + str(i % 16), base + i);
      Frame pub;
      pub.type = MsgType::status_publish;
      pub.correlation_id = i;
      pub.body = encode_status_publish(s);
      auto bytes = encode_frame(pub);
      wire.insert(wire.end(), bytes.begin(), bytes.end());
    }
    auto t0 = std::chrono::steady_clock::now();
    client.send_raw(wire);
    Frame query;
    query.type = MsgType::status_query;
    query.correlation_id = 1;
    query.body = encode_status_query({1u << 30});
    client.send(query);
    auto reply = decode_status_snapshot(client.recv().body);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rate = kCount / secs;
    drops = reply.drops;
  }
  server.stop();
  require(drops == 0, str(drops) + " drops during the load test");
  require(rate >= 10000.0, str(rate) + " publishes/sec < 10000");
  return "stale flags exact; " + str(static_cast<long>(rate)) + " publishes/sec with 0 drops";
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "matching-latency", c1_matching_latency},
      {2, "batch-tradeoff-shape", c2_batchcurve},
      {3, "keyframe-speedup", c3_keyframe},
      {4, "raw-scan-throughput", c4_decode},
      {5, "orchestrator-optimality", c5_orchestrator},
      {6, "batching-contract", c6_batching},
      {7, "protocol-roundtrip", c7_protocol},
      {8, "end-to-end-self-match", c8_selfmatch},
      {9, "monitor", c9_monitor},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    try {
      std::string detail = c.run();
      std::printf("PASS  %d %-26s %s\n", c.id, c.name, detail.c_str());
    } catch (const std::exception& e) {
      std::printf("FAIL  %d %-26s %s\n", c.id, c.name, e.what());
      ++failed;
    }
    std::fflush(stdout);
  }
  if (failed != 0) std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed;
}
