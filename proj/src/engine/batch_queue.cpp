#include "v2r/batch_queue.hpp"

#include <limits>

namespace v2r {

const char* trigger_name(BatchTrigger t) {
  switch (t) {
    case BatchTrigger::size: return "size";
    case BatchTrigger::timeout: return "timeout";
    case BatchTrigger::drain: return "drain";
  }
  return "size";
}

BatchingEngine::BatchingEngine(const Clock* clock) : clock_(clock) {}

void BatchingEngine::open_queue(const std::string& model_id, TensorSpec item_spec,
                                uint32_t batch_size) {
  if (batch_size < 1) raise(Errc::invalid_argument, "batch_size must be >= 1");
  item_spec.validate();
  std::lock_guard lock(mu_);
  auto [it, inserted] = queues_.try_emplace(model_id);
  it->second.spec = std::move(item_spec);
  it->second.batch_size = batch_size;
  it->second.closed = false;
}

bool BatchingEngine::has_queue(const std::string& model_id) const {
  std::lock_guard lock(mu_);
  return queues_.contains(model_id);
}

void BatchingEngine::set_batch_size(const std::string& model_id, uint32_t batch_size) {
  if (batch_size < 1) raise(Errc::invalid_argument, "batch_size must be >= 1");
  std::lock_guard lock(mu_);
  auto it = queues_.find(model_id);
  if (it == queues_.end()) raise(Errc::unknown_model_queue, "no queue for " + model_id);
  it->second.batch_size = batch_size;
}

InferenceBatch BatchingEngine::cut_locked(const std::string& model_id, Queue& q, size_t count,
                                          BatchTrigger trigger) {
  InferenceBatch batch;
  batch.batch_id = next_batch_++;
  batch.model_id = model_id;
  batch.formed_at = clock_->now_ms();
  batch.trigger = trigger;
  batch.requests.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    batch.requests.push_back(std::move(q.pending.front()));
    q.pending.pop_front();
  }
  return batch;
}

std::vector<InferenceBatch> BatchingEngine::submit(InferenceRequest request) {
  std::lock_guard lock(mu_);
  auto it = queues_.find(request.model_id);
  if (it == queues_.end()) raise(Errc::unknown_model_queue, "no queue for " + request.model_id);
  Queue& q = it->second;
  if (q.closed) raise(Errc::queue_closed, "queue closed: " + request.model_id);
  if (!q.spec.item_matches(request.payload))
    raise(Errc::payload_mismatch, "payload violates input spec " + q.spec.str());
  if (!(request.deadline_ms > 0.0f)) raise(Errc::invalid_argument, "deadline_ms must be > 0");

  request.enqueued_at = clock_->now_ms();
  q.pending.push_back(std::move(request));

  std::vector<InferenceBatch> out;
  while (q.pending.size() >= q.batch_size)
    out.push_back(cut_locked(it->first, q, q.batch_size, BatchTrigger::size));
  return out;
}

std::vector<InferenceBatch> BatchingEngine::tick() {
  std::lock_guard lock(mu_);
  double now = clock_->now_ms();
  std::vector<InferenceBatch> out;
  for (auto& [model_id, q] : queues_) {
    while (!q.pending.empty() &&
           now - q.pending.front().enqueued_at >= q.pending.front().deadline_ms) {
      size_t count = std::min(q.pending.size(), static_cast<size_t>(q.batch_size));
      out.push_back(cut_locked(model_id, q, count, BatchTrigger::timeout));
    }
  }
  return out;
}

std::vector<InferenceBatch> BatchingEngine::drain(const std::string& model_id) {
  std::lock_guard lock(mu_);
  auto it = queues_.find(model_id);
  if (it == queues_.end()) raise(Errc::unknown_model_queue, "no queue for " + model_id);
  std::vector<InferenceBatch> out;
  Queue& q = it->second;
  while (!q.pending.empty()) {
    size_t count = std::min(q.pending.size(), static_cast<size_t>(q.batch_size));
    out.push_back(cut_locked(model_id, q, count, BatchTrigger::drain));
  }
  return out;
}

std::vector<InferenceBatch> BatchingEngine::drain_all() {
  std::vector<InferenceBatch> out;
  std::vector<std::string> ids;
  {
    std::lock_guard lock(mu_);
    for (auto& [model_id, q] : queues_) ids.push_back(model_id);
  }
  for (const auto& id : ids) {
    auto batches = drain(id);
    for (auto& b : batches) out.push_back(std::move(b));
  }
  return out;
}

void BatchingEngine::close(const std::string& model_id) {
  std::lock_guard lock(mu_);
  auto it = queues_.find(model_id);
  if (it == queues_.end()) raise(Errc::unknown_model_queue, "no queue for " + model_id);
  it->second.closed = true;
}

size_t BatchingEngine::queue_depth(const std::string& model_id) const {
  std::lock_guard lock(mu_);
  auto it = queues_.find(model_id);
  return it == queues_.end() ? 0 : it->second.pending.size();
}

double BatchingEngine::next_deadline_at() const {
  std::lock_guard lock(mu_);
  double at = std::numeric_limits<double>::infinity();
  for (const auto& [model_id, q] : queues_)
    if (!q.pending.empty())
      at = std::min(at, q.pending.front().enqueued_at + q.pending.front().deadline_ms);
  return at;
}

}  // namespace v2r
