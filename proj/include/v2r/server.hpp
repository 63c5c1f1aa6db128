#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "v2r/executors.hpp"
#include "v2r/matching.hpp"
#include "v2r/monitor.hpp"
#include "v2r/protocol.hpp"

namespace v2r {

// Feature fork: every inference feature is appended to the HYFV sink file
// and, when an index is attached, ingested for matching.
class FeatureSink {
 public:
  FeatureSink(std::optional<std::filesystem::path> file_path, uint32_t dim,
              std::shared_ptr<FlatIndex> index);

  void append(const FeatureVector& f);
  void flush();
  uint32_t dim() const { return dim_; }
  std::shared_ptr<FlatIndex> index() const { return index_; }
  size_t appended() const { return appended_.load(); }

 private:
  uint32_t dim_;
  std::mutex mu_;
  std::optional<FeatureFileWriter> file_;
  std::shared_ptr<FlatIndex> index_;
  std::atomic<size_t> appended_{0};
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  uint16_t port = 7878;          // 0 = ephemeral
  size_t worker_threads = 0;     // 0 = hardware concurrency
  size_t dispatch_capacity = 64; // queued batches before reads back-pressure
  size_t max_frame = max_frame_bytes();
  bool self_report = false;      // publish own WorkerStatus at 1 Hz
  std::string worker_id = "server";
};

// Network-facing inference service. One acceptor, a reader thread per
// connection, a bounded dispatch queue feeding a worker pool. A full queue
// pauses reads (TCP back-pressure); frames are never dropped.
class ModelServer {
 public:
  ModelServer(ServerConfig cfg, std::map<std::string, std::shared_ptr<Executor>> executors,
              std::shared_ptr<FeatureSink> sink = nullptr,
              std::shared_ptr<StatusTable> monitor = nullptr);
  ~ModelServer();

  void start();  // throws BindFailure
  void stop();   // graceful: in-flight batches complete, responses flush

  uint16_t bound_port() const { return bound_port_; }
  StatusTable& monitor() { return *monitor_; }
  const StatusTable& monitor() const { return *monitor_; }
  std::shared_ptr<FeatureSink> sink() const { return sink_; }

 private:
  struct Job {
    int fd = -1;
    uint64_t correlation_id = 0;
    InferRequestMsg request;
  };

  void accept_loop();
  void connection_loop(int fd);
  void worker_loop();
  void report_loop();
  void handle_frame(int fd, const Frame& frame);
  void send_frame(int fd, const Frame& frame);
  void send_error(int fd, uint64_t correlation, Errc code, const std::string& message,
                  std::vector<uint64_t> request_ids = {});
  InferResponseMsg run_batch(const InferRequestMsg& request);

  ServerConfig cfg_;
  std::map<std::string, std::shared_ptr<Executor>> executors_;
  std::shared_ptr<FeatureSink> sink_;
  std::shared_ptr<StatusTable> monitor_;

  int listen_fd_ = -1;
  uint16_t bound_port_ = 0;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  std::vector<std::thread> workers_;
  std::thread reporter_;

  std::mutex conn_mu_;
  std::vector<std::thread> conn_threads_;
  std::vector<int> conn_fds_;
  std::map<int, std::shared_ptr<std::mutex>> write_locks_;

  std::mutex queue_mu_;
  std::condition_variable queue_cv_;   // waiting workers
  std::condition_variable space_cv_;   // waiting readers (back-pressure)
  std::deque<Job> dispatch_;
  size_t inflight_jobs_ = 0;
  std::condition_variable idle_cv_;    // stop() waits for drain

  std::map<std::string, std::atomic<uint32_t>> model_inflight_;
};

// host:port -> (host, port); throws InvalidArgument.
std::pair<std::string, uint16_t> parse_host_port(const std::string& s);

// Minimal blocking client for the framed protocol (CLI + tests).
class FrameClient {
 public:
  FrameClient(const std::string& host, uint16_t port);  // throws BindFailure on connect error
  ~FrameClient();
  FrameClient(const FrameClient&) = delete;
  FrameClient& operator=(const FrameClient&) = delete;

  void send(const Frame& frame);
  // Blocks for the next frame; throws on EOF/IO error.
  Frame recv(size_t max_bytes = max_frame_bytes());
  // Sends raw bytes verbatim (protocol-abuse tests).
  void send_raw(std::span<const uint8_t> bytes);

 private:
  int fd_ = -1;
};

}  // namespace v2r
