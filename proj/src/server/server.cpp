#include "v2r/server.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/resource.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>

namespace v2r {

// ---- FeatureSink ----

FeatureSink::FeatureSink(std::optional<std::filesystem::path> file_path, uint32_t dim,
                         std::shared_ptr<FlatIndex> index)
    : dim_(dim), index_(std::move(index)) {
  if (dim < 1) raise(Errc::bad_dimensions, "sink dim must be >= 1");
  if (index_ != nullptr && index_->dim() != dim)
    raise(Errc::dim_mismatch, "sink index dim does not match");
  if (file_path.has_value()) file_.emplace(std::move(*file_path), dim);
}

void FeatureSink::append(const FeatureVector& f) {
  if (f.dim() != dim_) raise(Errc::dim_mismatch, "feature dim mismatch in sink");
  std::lock_guard lock(mu_);
  if (file_.has_value()) file_->append(f);
  if (index_ != nullptr) index_->add(std::span<const FeatureVector>(&f, 1));
  appended_.fetch_add(1);
}

void FeatureSink::flush() {
  std::lock_guard lock(mu_);
  if (file_.has_value()) file_->flush();
}

// ---- socket helpers ----

namespace {

bool read_exact(int fd, uint8_t* buf, size_t n) {
  size_t got = 0;
  while (got < n) {
    ssize_t r = ::recv(fd, buf + got, n - got, 0);
    if (r == 0) return false;  // peer closed
    if (r < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    got += static_cast<size_t>(r);
  }
  return true;
}

// Userspace read buffer so high-rate small frames (status publishes) do not
// pay one recv syscall each.
class BufferedReader {
 public:
  explicit BufferedReader(int fd) : fd_(fd), buf_(256 * 1024) {}

  bool read_exact(uint8_t* out, size_t n) {
    while (n > 0) {
      if (pos_ == end_) {
        ssize_t r = ::recv(fd_, buf_.data(), buf_.size(), 0);
        if (r == 0) return false;
        if (r < 0) {
          if (errno == EINTR) continue;
          return false;
        }
        pos_ = 0;
        end_ = static_cast<size_t>(r);
      }
      size_t take = std::min(n, end_ - pos_);
      std::memcpy(out, buf_.data() + pos_, take);
      pos_ += take;
      out += take;
      n -= take;
    }
    return true;
  }

 private:
  int fd_;
  std::vector<uint8_t> buf_;
  size_t pos_ = 0;
  size_t end_ = 0;
};

bool write_all(int fd, const uint8_t* buf, size_t n) {
  size_t sent = 0;
  while (sent < n) {
    ssize_t r = ::send(fd, buf + sent, n - sent, MSG_NOSIGNAL);
    if (r < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    sent += static_cast<size_t>(r);
  }
  return true;
}

uint32_t read_u32le(const uint8_t* b) {
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

}  // namespace

std::pair<std::string, uint16_t> parse_host_port(const std::string& s) {
  auto colon = s.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 >= s.size())
    raise(Errc::invalid_argument, "expected host:port, got " + s);
  unsigned long port = 0;
  try {
    port = std::stoul(s.substr(colon + 1));
  } catch (const std::exception&) {
    raise(Errc::invalid_argument, "bad port in " + s);
  }
  if (port > 0xFFFF) raise(Errc::invalid_argument, "port out of range in " + s);
  return {s.substr(0, colon), static_cast<uint16_t>(port)};
}

// ---- ModelServer ----

ModelServer::ModelServer(ServerConfig cfg, std::map<std::string, std::shared_ptr<Executor>> executors,
                         std::shared_ptr<FeatureSink> sink, std::shared_ptr<StatusTable> monitor)
    : cfg_(std::move(cfg)), executors_(std::move(executors)), sink_(std::move(sink)),
      monitor_(monitor != nullptr ? std::move(monitor) : std::make_shared<StatusTable>()) {
  for (const auto& [model_id, ex] : executors_) model_inflight_[model_id] = 0;
}

ModelServer::~ModelServer() {
  if (running_.load()) stop();
}

void ModelServer::start() {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) raise(Errc::bind_failure, "socket(): " + std::string(strerror(errno)));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(cfg_.port);
  if (::inet_pton(AF_INET, cfg_.host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    raise(Errc::bind_failure, "bad bind address " + cfg_.host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(listen_fd_, 64) != 0) {
    int err = errno;
    ::close(listen_fd_);
    listen_fd_ = -1;
    raise(Errc::bind_failure,
          "cannot bind " + cfg_.host + ":" + std::to_string(cfg_.port) + ": " + strerror(err));
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  bound_port_ = ntohs(addr.sin_port);

  running_.store(true);
  size_t nworkers = cfg_.worker_threads != 0
                        ? cfg_.worker_threads
                        : std::max(1u, std::thread::hardware_concurrency());
  for (size_t i = 0; i < nworkers; ++i) workers_.emplace_back([this] { worker_loop(); });
  acceptor_ = std::thread([this] { accept_loop(); });
  if (cfg_.self_report) reporter_ = std::thread([this] { report_loop(); });
}

void ModelServer::stop() {
  if (!running_.exchange(false)) return;
  if (listen_fd_ >= 0) {
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  if (acceptor_.joinable()) acceptor_.join();
  if (reporter_.joinable()) reporter_.join();

  // Stop readers; queued jobs still drain and responses still flush.
  {
    std::lock_guard lock(conn_mu_);
    for (int fd : conn_fds_) ::shutdown(fd, SHUT_RD);
  }
  space_cv_.notify_all();
  {
    std::unique_lock lock(queue_mu_);
    idle_cv_.wait(lock, [this] { return dispatch_.empty() && inflight_jobs_ == 0; });
  }
  queue_cv_.notify_all();
  for (auto& w : workers_) w.join();
  workers_.clear();

  std::vector<std::thread> conns;
  {
    std::lock_guard lock(conn_mu_);
    for (int fd : conn_fds_) {
      ::shutdown(fd, SHUT_RDWR);
      ::close(fd);
    }
    conn_fds_.clear();
    conns.swap(conn_threads_);
    write_locks_.clear();
  }
  for (auto& t : conns) t.join();
}

void ModelServer::accept_loop() {
  while (running_.load()) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      break;  // listener closed
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    std::lock_guard lock(conn_mu_);
    if (!running_.load()) {
      ::close(fd);
      break;
    }
    conn_fds_.push_back(fd);
    write_locks_[fd] = std::make_shared<std::mutex>();
    conn_threads_.emplace_back([this, fd] { connection_loop(fd); });
  }
}

void ModelServer::send_frame(int fd, const Frame& frame) {
  auto bytes = encode_frame(frame);
  std::shared_ptr<std::mutex> lock;
  {
    std::lock_guard g(conn_mu_);
    auto it = write_locks_.find(fd);
    if (it == write_locks_.end()) return;  // connection already torn down
    lock = it->second;
  }
  std::lock_guard g(*lock);
  write_all(fd, bytes.data(), bytes.size());
}

void ModelServer::send_error(int fd, uint64_t correlation, Errc code, const std::string& message,
                             std::vector<uint64_t> request_ids) {
  ErrorMsg err;
  err.code = static_cast<uint16_t>(exit_code(code));
  err.message = std::string(errc_name(code)) + ": " + message;
  err.request_ids = std::move(request_ids);
  Frame f;
  f.type = MsgType::error;
  f.correlation_id = correlation;
  f.body = encode_error(err);
  send_frame(fd, f);
}

void ModelServer::connection_loop(int fd) {
  BufferedReader reader(fd);
  std::vector<uint8_t> payload;
  while (running_.load()) {
    uint8_t len_buf[4];
    if (!reader.read_exact(len_buf, 4)) break;
    uint32_t len = read_u32le(len_buf);
    if (len > cfg_.max_frame) {
      // Oversize declaration is itself the protocol violation; the payload
      // is not consumed and the connection stays usable.
      send_error(fd, 0, Errc::malformed_body,
                 "frame length " + std::to_string(len) + " exceeds limit");
      continue;
    }
    if (len < kFrameOverhead) {
      payload.resize(len);
      if (len > 0 && !reader.read_exact(payload.data(), len)) break;
      send_error(fd, 0, Errc::malformed_body, "frame shorter than header");
      continue;
    }
    payload.resize(len);
    if (!reader.read_exact(payload.data(), len)) break;

    Frame frame;
    uint8_t type = payload[0];
    uint64_t correlation = 0;
    for (int i = 0; i < 8; ++i) correlation |= static_cast<uint64_t>(payload[1 + i]) << (8 * i);
    if (type < 1 || type > 6) {
      send_error(fd, correlation, Errc::malformed_body, "unknown msg_type");
      continue;
    }
    frame.type = static_cast<MsgType>(type);
    frame.correlation_id = correlation;
    frame.body.assign(payload.begin() + kFrameOverhead, payload.end());
    handle_frame(fd, frame);
  }
}

void ModelServer::handle_frame(int fd, const Frame& frame) {
  switch (frame.type) {
    case MsgType::infer_request: {
      InferRequestMsg req;
      try {
        req = decode_infer_request(frame.body);
      } catch (const Error& e) {
        send_error(fd, frame.correlation_id, e.code(), e.what());
        return;
      }
      std::unique_lock lock(queue_mu_);
      space_cv_.wait(lock, [this] {
        return dispatch_.size() < cfg_.dispatch_capacity || !running_.load();
      });
      if (!running_.load()) return;
      dispatch_.push_back(Job{fd, frame.correlation_id, std::move(req)});
      ++inflight_jobs_;
      lock.unlock();
      queue_cv_.notify_one();
      return;
    }
    case MsgType::status_query: {
      try {
        StatusQueryMsg q = decode_status_query(frame.body);
        ClusterSnapshot snap = monitor_->snapshot(q.ttl_ms);
        StatusSnapshotMsg msg;
        msg.taken_at = snap.taken_at;
        msg.drops = snap.drops;
        for (const auto& [id, entry] : snap.workers)
          msg.workers.push_back({entry.status, entry.stale});
        Frame out;
        out.type = MsgType::status_snapshot;
        out.correlation_id = frame.correlation_id;
        out.body = encode_status_snapshot(msg);
        send_frame(fd, out);
      } catch (const Error& e) {
        send_error(fd, frame.correlation_id, e.code(), e.what());
      }
      return;
    }
    case MsgType::status_publish: {
      try {
        WorkerStatus status = decode_status_publish(frame.body);
        monitor_->publish(status);  // fire-and-forget; drops counted
      } catch (const Error& e) {
        send_error(fd, frame.correlation_id, e.code(), e.what());
      }
      return;
    }
    default:
      send_error(fd, frame.correlation_id, Errc::malformed_body,
                 "unexpected msg_type for a server");
      return;
  }
}

InferResponseMsg ModelServer::run_batch(const InferRequestMsg& request) {
  auto it = executors_.find(request.model_id);
  if (it == executors_.end()) raise(Errc::unknown_model, "no executor for " + request.model_id);

  std::vector<BatchItem> items;
  items.reserve(request.items.size());
  for (const auto& item : request.items) items.push_back({item.request_id, &item.tensor});

  auto& inflight = model_inflight_.find(request.model_id)->second;
  inflight.fetch_add(1);
  std::vector<ExecutorOutput> outputs;
  try {
    outputs = it->second->execute(std::span<const BatchItem>(items));
  } catch (...) {
    inflight.fetch_sub(1);
    throw;
  }
  inflight.fetch_sub(1);

  if (sink_ != nullptr) {
    for (const auto& o : outputs)
      if (o.feature.has_value()) sink_->append(*o.feature);
    sink_->flush();
  }
  InferResponseMsg resp;
  resp.outputs = std::move(outputs);
  return resp;
}

void ModelServer::worker_loop() {
  while (true) {
    Job job;
    {
      std::unique_lock lock(queue_mu_);
      queue_cv_.wait(lock, [this] { return !dispatch_.empty() || !running_.load(); });
      if (dispatch_.empty()) {
        if (!running_.load()) return;
        continue;
      }
      job = std::move(dispatch_.front());
      dispatch_.pop_front();
    }
    space_cv_.notify_one();

    std::vector<uint64_t> ids;
    ids.reserve(job.request.items.size());
    for (const auto& item : job.request.items) ids.push_back(item.request_id);
    try {
      InferResponseMsg resp = run_batch(job.request);
      Frame out;
      out.type = MsgType::infer_response;
      out.correlation_id = job.correlation_id;
      out.body = encode_infer_response(resp);
      send_frame(job.fd, out);
    } catch (const Error& e) {
      send_error(job.fd, job.correlation_id, e.code(), e.what(), std::move(ids));
    } catch (const std::exception& e) {
      send_error(job.fd, job.correlation_id, Errc::executor_failure, e.what(), std::move(ids));
    }

    {
      std::lock_guard lock(queue_mu_);
      --inflight_jobs_;
    }
    idle_cv_.notify_all();
  }
}

void ModelServer::report_loop() {
  using namespace std::chrono;
  auto cpu_time = [] {
    rusage ru{};
    getrusage(RUSAGE_SELF, &ru);
    auto tv = [](const timeval& t) { return t.tv_sec * 1.0 + t.tv_usec * 1e-6; };
    return tv(ru.ru_utime) + tv(ru.ru_stime);
  };
  auto rss_bytes = [] {
    std::ifstream statm("/proc/self/statm");
    uint64_t size = 0, resident = 0;
    if (statm >> size >> resident) return resident * static_cast<uint64_t>(sysconf(_SC_PAGESIZE));
    return static_cast<uint64_t>(0);
  };
  double prev_cpu = cpu_time();
  auto prev_wall = steady_clock::now();
  const double ncores = std::max(1u, std::thread::hardware_concurrency());
  while (running_.load()) {
    std::this_thread::sleep_for(milliseconds(1000));
    if (!running_.load()) break;
    double cpu = cpu_time();
    auto wall = steady_clock::now();
    double dt = duration<double>(wall - prev_wall).count();
    float pct = dt > 0 ? static_cast<float>((cpu - prev_cpu) / dt / ncores * 100.0) : 0.0f;
    prev_cpu = cpu;
    prev_wall = wall;

    WorkerStatus status;
    status.worker_id = cfg_.worker_id;
    status.timestamp = utc_now_ms();
    status.cpu_pct = std::min(100.0f, std::max(0.0f, pct));
    status.mem_bytes = rss_bytes();
    {
      std::lock_guard lock(queue_mu_);
      status.queue_depths["dispatch"] = static_cast<uint32_t>(dispatch_.size());
    }
    for (auto& [model_id, count] : model_inflight_)
      status.inflight[model_id] = count.load();
    monitor_->publish(status);
  }
}

// ---- FrameClient ----

FrameClient::FrameClient(const std::string& host, uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 ||
      res == nullptr)
    raise(Errc::bind_failure, "cannot resolve " + host);
  fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd_ < 0 || ::connect(fd_, res->ai_addr, res->ai_addrlen) != 0) {
    int err = errno;
    if (fd_ >= 0) ::close(fd_);
    ::freeaddrinfo(res);
    raise(Errc::bind_failure, "cannot connect to " + host + ":" + std::to_string(port) + ": " +
                                  strerror(err));
  }
  ::freeaddrinfo(res);
  int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

FrameClient::~FrameClient() {
  if (fd_ >= 0) ::close(fd_);
}

void FrameClient::send(const Frame& frame) {
  auto bytes = encode_frame(frame);
  if (!write_all(fd_, bytes.data(), bytes.size())) raise(Errc::io_error, "send failed");
}

void FrameClient::send_raw(std::span<const uint8_t> bytes) {
  if (!write_all(fd_, bytes.data(), bytes.size())) raise(Errc::io_error, "send failed");
}

Frame FrameClient::recv(size_t max_bytes) {
  uint8_t len_buf[4];
  if (!read_exact(fd_, len_buf, 4)) raise(Errc::io_error, "connection closed");
  uint32_t len = read_u32le(len_buf);
  if (len > max_bytes) raise(Errc::malformed_body, "oversize frame from server");
  if (len < kFrameOverhead) raise(Errc::malformed_body, "short frame from server");
  std::vector<uint8_t> payload(len);
  if (!read_exact(fd_, payload.data(), len)) raise(Errc::io_error, "connection closed mid-frame");
  Frame f;
  uint8_t type = payload[0];
  if (type < 1 || type > 6) raise(Errc::malformed_body, "unknown msg_type from server");
  f.type = static_cast<MsgType>(type);
  for (int i = 0; i < 8; ++i) f.correlation_id |= static_cast<uint64_t>(payload[1 + i]) << (8 * i);
  f.body.assign(payload.begin() + kFrameOverhead, payload.end());
  return f;
}

}  // namespace v2r
