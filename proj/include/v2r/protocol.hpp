#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "v2r/executors.hpp"
#include "v2r/monitor.hpp"
#include "v2r/tensor.hpp"

namespace v2r {

// Length-prefixed binary protocol: length u32 LE (payload bytes), then
// payload = msg_type u8, correlation_id u64 LE, body. Layouts are bit-exact;
// decode(encode(x)) == x for every message type.

enum class MsgType : uint8_t {
  infer_request = 1,
  infer_response = 2,
  status_query = 3,
  status_snapshot = 4,
  error = 5,
  status_publish = 6,
};

struct Frame {
  MsgType type = MsgType::error;
  uint64_t correlation_id = 0;
  std::vector<uint8_t> body;
};

constexpr size_t kFrameOverhead = 1 + 8;  // msg_type + correlation_id

// V2R_MAX_FRAME_MB (default 64) as bytes.
size_t max_frame_bytes();

std::vector<uint8_t> encode_frame(const Frame& f);
// Decodes a frame from length-prefixed bytes (for tests; socket IO lives in
// the server). Throws MalformedBody.
Frame decode_frame(std::span<const uint8_t> buf, size_t max_bytes = max_frame_bytes());

// ---- message bodies ----

struct InferRequestMsg {
  struct Item {
    uint64_t request_id = 0;
    Tensor tensor;

    bool operator==(const Item&) const = default;
  };
  std::string model_id;
  std::vector<Item> items;

  bool operator==(const InferRequestMsg&) const = default;
};

struct InferResponseMsg {
  std::vector<ExecutorOutput> outputs;

  bool operator==(const InferResponseMsg&) const = default;
};

struct StatusQueryMsg {
  uint32_t ttl_ms = 3000;

  bool operator==(const StatusQueryMsg&) const = default;
};

struct StatusSnapshotMsg {
  uint64_t taken_at = 0;
  uint64_t drops = 0;
  struct Entry {
    WorkerStatus status;
    bool stale = false;

    bool operator==(const Entry&) const = default;
  };
  std::vector<Entry> workers;

  bool operator==(const StatusSnapshotMsg&) const = default;
};

struct ErrorMsg {
  uint16_t code = 0;  // exit-code family of the underlying error
  std::string message;
  std::vector<uint64_t> request_ids;

  bool operator==(const ErrorMsg&) const = default;
};

std::vector<uint8_t> encode_infer_request(const InferRequestMsg& m);
InferRequestMsg decode_infer_request(std::span<const uint8_t> body);

std::vector<uint8_t> encode_infer_response(const InferResponseMsg& m);
InferResponseMsg decode_infer_response(std::span<const uint8_t> body);

std::vector<uint8_t> encode_status_query(const StatusQueryMsg& m);
StatusQueryMsg decode_status_query(std::span<const uint8_t> body);

std::vector<uint8_t> encode_status_snapshot(const StatusSnapshotMsg& m);
StatusSnapshotMsg decode_status_snapshot(std::span<const uint8_t> body);

std::vector<uint8_t> encode_status_publish(const WorkerStatus& s);
WorkerStatus decode_status_publish(std::span<const uint8_t> body);

std::vector<uint8_t> encode_error(const ErrorMsg& m);
ErrorMsg decode_error(std::span<const uint8_t> body);

}  // namespace v2r
