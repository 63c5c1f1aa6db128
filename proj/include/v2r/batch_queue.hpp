#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "v2r/clock.hpp"
#include "v2r/tensor.hpp"

namespace v2r {

struct InferenceRequest {
  uint64_t request_id = 0;
  std::string model_id;
  Tensor payload;
  double enqueued_at = 0.0;   // monotonic ms, stamped on submit
  float deadline_ms = 50.0f;  // max queueing wait
};

enum class BatchTrigger : uint8_t { size = 0, timeout = 1, drain = 2 };

const char* trigger_name(BatchTrigger t);

struct InferenceBatch {
  uint64_t batch_id = 0;
  std::string model_id;
  std::vector<InferenceRequest> requests;  // FIFO by enqueued_at
  double formed_at = 0.0;
  BatchTrigger trigger = BatchTrigger::size;
};

// Dynamic batcher: one FIFO queue per model, cut by the active plan's batch
// size or by the oldest request's deadline. Pure state machine driven by
// submit/tick/drain against an injected clock; emitted batches are returned
// to the caller, which forwards them to the model server.
class BatchingEngine {
 public:
  explicit BatchingEngine(const Clock* clock = &SteadyClock::instance());

  void open_queue(const std::string& model_id, TensorSpec item_spec, uint32_t batch_size);
  bool has_queue(const std::string& model_id) const;

  // Plan switch; applies to batches formed afterwards. UnknownModelQueue if
  // the queue was never opened.
  void set_batch_size(const std::string& model_id, uint32_t batch_size);

  uint64_t next_request_id() { return next_request_.fetch_add(1); }

  // FIFO append; returns any batches the submit completed (trigger=size).
  std::vector<InferenceBatch> submit(InferenceRequest request);

  // Deadline pass over all queues (trigger=timeout). Call whenever the clock
  // may have crossed the oldest deadline.
  std::vector<InferenceBatch> tick();

  // Flushes everything still queued for the model (trigger=drain).
  std::vector<InferenceBatch> drain(const std::string& model_id);
  std::vector<InferenceBatch> drain_all();

  void close(const std::string& model_id);

  size_t queue_depth(const std::string& model_id) const;
  // Earliest pending deadline as an absolute clock value; infinity when idle.
  double next_deadline_at() const;

 private:
  struct Queue {
    TensorSpec spec;
    uint32_t batch_size = 1;
    bool closed = false;
    std::deque<InferenceRequest> pending;
  };

  InferenceBatch cut_locked(const std::string& model_id, Queue& q, size_t count,
                            BatchTrigger trigger);

  const Clock* clock_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, Queue> queues_;
  std::atomic<uint64_t> next_request_{1};
  uint64_t next_batch_ = 1;
};

}  // namespace v2r
