#pragma once

#include <stdexcept>
#include <string>

namespace v2r {

enum class Errc {
  ok = 0,
  invalid_argument,

  // registry
  invalid_manifest,
  duplicate_version,
  not_found,
  corrupt_blob,
  storage_failure,

  // executors
  shape_mismatch,
  batch_too_large,
  bad_dimensions,
  executor_failure,

  // profiler / orchestrator
  empty_samples,
  invalid_record,
  no_profile,
  unknown_model_queue,

  // data engine
  queue_closed,
  payload_mismatch,
  bad_magic,
  truncated_stream,
  unsupported_version,
  empty_stream,

  // matching
  dim_mismatch,
  duplicate_id,
  zero_vector,
  empty_index,
  truncated_index,
  version_mismatch,

  // protocol / server / monitor
  malformed_body,
  malformed_status,
  unknown_model,
  bind_failure,

  io_error,
};

const char* errc_name(Errc c);

// Stable process exit code per error family. Documented in the README;
// tests pin these values.
int exit_code(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace v2r
