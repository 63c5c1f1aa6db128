#include "v2r/protocol.hpp"

#include <cstdlib>

#include "v2r/bytes.hpp"

namespace v2r {

size_t max_frame_bytes() {
  static size_t cached = [] {
    const char* env = std::getenv("V2R_MAX_FRAME_MB");
    if (env != nullptr) {
      char* end = nullptr;
      unsigned long mb = std::strtoul(env, &end, 10);
      if (end != env && mb >= 1 && mb <= 4096) return static_cast<size_t>(mb) << 20;
    }
    return static_cast<size_t>(64) << 20;
  }();
  return cached;
}

std::vector<uint8_t> encode_frame(const Frame& f) {
  size_t payload = kFrameOverhead + f.body.size();
  ByteWriter w;
  w.u32(static_cast<uint32_t>(payload));
  w.u8(static_cast<uint8_t>(f.type));
  w.u64(f.correlation_id);
  w.bytes(f.body);
  return w.take();
}

Frame decode_frame(std::span<const uint8_t> buf, size_t max_bytes) {
  ByteReader r(buf);
  uint32_t len = r.u32();
  if (len > max_bytes) raise(Errc::malformed_body, "frame length exceeds limit");
  if (len < kFrameOverhead) raise(Errc::malformed_body, "frame shorter than header");
  auto payload = r.bytes(len);
  r.expect_end();
  ByteReader pr(payload);
  Frame f;
  uint8_t type = pr.u8();
  if (type < 1 || type > 6) raise(Errc::malformed_body, "unknown msg_type");
  f.type = static_cast<MsgType>(type);
  f.correlation_id = pr.u64();
  auto body = pr.bytes(len - kFrameOverhead);
  f.body.assign(body.begin(), body.end());
  return f;
}

namespace {

constexpr uint8_t kMaxTensorRank = 8;

void encode_tensor(ByteWriter& w, const Tensor& t) {
  w.u8(static_cast<uint8_t>(t.dims.size()));
  for (uint32_t d : t.dims) w.u32(d);
  w.u8(static_cast<uint8_t>(t.dtype));
  w.bytes(t.data);
}

Tensor decode_tensor(ByteReader& r) {
  Tensor t;
  uint8_t ndim = r.u8();
  if (ndim == 0 || ndim > kMaxTensorRank)
    raise(Errc::malformed_body, "tensor rank out of range at offset " + std::to_string(r.pos()));
  uint64_t elems = 1;
  for (uint8_t i = 0; i < ndim; ++i) {
    uint32_t d = r.u32();
    if (d == 0) raise(Errc::malformed_body, "zero tensor dim at offset " + std::to_string(r.pos()));
    elems *= d;
    if (elems > (1ull << 32))
      raise(Errc::malformed_body, "tensor too large at offset " + std::to_string(r.pos()));
    t.dims.push_back(d);
  }
  uint8_t dtype = r.u8();
  if (dtype > 1) raise(Errc::malformed_body, "unknown dtype at offset " + std::to_string(r.pos()));
  t.dtype = static_cast<Dtype>(dtype);
  auto raw = r.bytes(elems * dtype_size(t.dtype));
  t.data.assign(raw.begin(), raw.end());
  return t;
}

void encode_feature(ByteWriter& w, const FeatureVector& f) {
  Tensor t = Tensor::from_floats({f.dim()}, f.values);
  encode_tensor(w, t);
}

FeatureVector decode_feature(ByteReader& r, uint64_t id) {
  Tensor t = decode_tensor(r);
  if (t.dtype != Dtype::f32 || t.dims.size() != 1)
    raise(Errc::malformed_body, "feature must be a 1-d f32 tensor");
  FeatureVector f;
  f.id = id;
  auto vals = t.f32();
  f.values.assign(vals.begin(), vals.end());
  return f;
}

void encode_status_body(ByteWriter& w, const WorkerStatus& s) {
  w.str16(s.worker_id);
  w.u64(s.timestamp);
  w.f32(s.cpu_pct);
  w.u64(s.mem_bytes);
  w.u16(static_cast<uint16_t>(s.queue_depths.size()));
  for (const auto& [model, depth] : s.queue_depths) {
    w.str16(model);
    w.u32(depth);
  }
  w.u16(static_cast<uint16_t>(s.inflight.size()));
  for (const auto& [model, n] : s.inflight) {
    w.str16(model);
    w.u32(n);
  }
  w.u8(s.device_util_pct.has_value() ? 1 : 0);
  if (s.device_util_pct.has_value()) w.f32(*s.device_util_pct);
}

WorkerStatus decode_status_body(ByteReader& r) {
  WorkerStatus s;
  s.worker_id = r.str16();
  s.timestamp = r.u64();
  s.cpu_pct = r.f32();
  s.mem_bytes = r.u64();
  uint16_t nq = r.u16();
  for (uint16_t i = 0; i < nq; ++i) {
    std::string model = r.str16();
    s.queue_depths[model] = r.u32();
  }
  uint16_t ni = r.u16();
  for (uint16_t i = 0; i < ni; ++i) {
    std::string model = r.str16();
    s.inflight[model] = r.u32();
  }
  uint8_t has_device = r.u8();
  if (has_device > 1) raise(Errc::malformed_body, "bad has_device flag");
  if (has_device == 1) s.device_util_pct = r.f32();
  return s;
}

}  // namespace

std::vector<uint8_t> encode_infer_request(const InferRequestMsg& m) {
  ByteWriter w;
  w.str16(m.model_id);
  w.u32(static_cast<uint32_t>(m.items.size()));
  for (const auto& item : m.items) {
    w.u64(item.request_id);
    encode_tensor(w, item.tensor);
  }
  return w.take();
}

InferRequestMsg decode_infer_request(std::span<const uint8_t> body) {
  ByteReader r(body);
  InferRequestMsg m;
  m.model_id = r.str16();
  uint32_t count = r.u32();
  for (uint32_t i = 0; i < count; ++i) {
    InferRequestMsg::Item item;
    item.request_id = r.u64();
    item.tensor = decode_tensor(r);
    m.items.push_back(std::move(item));
  }
  r.expect_end();
  return m;
}

std::vector<uint8_t> encode_infer_response(const InferResponseMsg& m) {
  ByteWriter w;
  w.u32(static_cast<uint32_t>(m.outputs.size()));
  for (const auto& o : m.outputs) {
    w.u64(o.request_id);
    w.u16(static_cast<uint16_t>(o.predictions.size()));
    for (const auto& p : o.predictions) {
      w.str16(p.label);
      w.f32(p.score);
    }
    w.u8(o.feature.has_value() ? 1 : 0);
    if (o.feature.has_value()) encode_feature(w, *o.feature);
  }
  return w.take();
}

InferResponseMsg decode_infer_response(std::span<const uint8_t> body) {
  ByteReader r(body);
  InferResponseMsg m;
  uint32_t count = r.u32();
  for (uint32_t i = 0; i < count; ++i) {
    ExecutorOutput o;
    o.request_id = r.u64();
    uint16_t preds = r.u16();
    for (uint16_t p = 0; p < preds; ++p) {
      Prediction pred;
      pred.label = r.str16();
      pred.score = r.f32();
      o.predictions.push_back(std::move(pred));
    }
    uint8_t has_feature = r.u8();
    if (has_feature > 1) raise(Errc::malformed_body, "bad has_feature flag");
    if (has_feature == 1) o.feature = decode_feature(r, o.request_id);
    m.outputs.push_back(std::move(o));
  }
  r.expect_end();
  return m;
}

std::vector<uint8_t> encode_status_query(const StatusQueryMsg& m) {
  ByteWriter w;
  w.u32(m.ttl_ms);
  return w.take();
}

StatusQueryMsg decode_status_query(std::span<const uint8_t> body) {
  ByteReader r(body);
  StatusQueryMsg m;
  m.ttl_ms = r.u32();
  r.expect_end();
  return m;
}

std::vector<uint8_t> encode_status_snapshot(const StatusSnapshotMsg& m) {
  ByteWriter w;
  w.u64(m.taken_at);
  w.u64(m.drops);
  w.u32(static_cast<uint32_t>(m.workers.size()));
  for (const auto& e : m.workers) {
    encode_status_body(w, e.status);
    w.u8(e.stale ? 1 : 0);
  }
  return w.take();
}

StatusSnapshotMsg decode_status_snapshot(std::span<const uint8_t> body) {
  ByteReader r(body);
  StatusSnapshotMsg m;
  m.taken_at = r.u64();
  m.drops = r.u64();
  uint32_t count = r.u32();
  for (uint32_t i = 0; i < count; ++i) {
    StatusSnapshotMsg::Entry e;
    e.status = decode_status_body(r);
    uint8_t stale = r.u8();
    if (stale > 1) raise(Errc::malformed_body, "bad stale flag");
    e.stale = stale == 1;
    m.workers.push_back(std::move(e));
  }
  r.expect_end();
  return m;
}

std::vector<uint8_t> encode_status_publish(const WorkerStatus& s) {
  ByteWriter w;
  encode_status_body(w, s);
  return w.take();
}

WorkerStatus decode_status_publish(std::span<const uint8_t> body) {
  ByteReader r(body);
  WorkerStatus s = decode_status_body(r);
  r.expect_end();
  return s;
}

std::vector<uint8_t> encode_error(const ErrorMsg& m) {
  ByteWriter w;
  w.u16(m.code);
  w.str16(m.message);
  w.u32(static_cast<uint32_t>(m.request_ids.size()));
  for (uint64_t id : m.request_ids) w.u64(id);
  return w.take();
}

ErrorMsg decode_error(std::span<const uint8_t> body) {
  ByteReader r(body);
  ErrorMsg m;
  m.code = r.u16();
  m.message = r.str16();
  uint32_t count = r.u32();
  for (uint32_t i = 0; i < count; ++i) m.request_ids.push_back(r.u64());
  r.expect_end();
  return m;
}

}  // namespace v2r
