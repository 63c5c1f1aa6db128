#include "v2r/errors.hpp"

namespace v2r {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::ok: return "Ok";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::invalid_manifest: return "InvalidManifest";
    case Errc::duplicate_version: return "DuplicateVersion";
    case Errc::not_found: return "NotFound";
    case Errc::corrupt_blob: return "CorruptBlob";
    case Errc::storage_failure: return "StorageFailure";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::batch_too_large: return "BatchTooLarge";
    case Errc::bad_dimensions: return "BadDimensions";
    case Errc::executor_failure: return "ExecutorFailure";
    case Errc::empty_samples: return "EmptySamples";
    case Errc::invalid_record: return "InvalidRecord";
    case Errc::no_profile: return "NoProfile";
    case Errc::unknown_model_queue: return "UnknownModelQueue";
    case Errc::queue_closed: return "QueueClosed";
    case Errc::payload_mismatch: return "PayloadMismatch";
    case Errc::bad_magic: return "BadMagic";
    case Errc::truncated_stream: return "TruncatedStream";
    case Errc::unsupported_version: return "UnsupportedVersion";
    case Errc::empty_stream: return "EmptyStream";
    case Errc::dim_mismatch: return "DimMismatch";
    case Errc::duplicate_id: return "DuplicateId";
    case Errc::zero_vector: return "ZeroVector";
    case Errc::empty_index: return "EmptyIndex";
    case Errc::truncated_index: return "TruncatedIndex";
    case Errc::version_mismatch: return "VersionMismatch";
    case Errc::malformed_body: return "MalformedBody";
    case Errc::malformed_status: return "MalformedStatus";
    case Errc::unknown_model: return "UnknownModel";
    case Errc::bind_failure: return "BindFailure";
    case Errc::io_error: return "IoError";
  }
  return "Unknown";
}

int exit_code(Errc c) {
  switch (c) {
    case Errc::ok:
      return 0;
    case Errc::invalid_argument:
      return 2;
    case Errc::not_found:
    case Errc::no_profile:
    case Errc::unknown_model:
    case Errc::unknown_model_queue:
      return 3;
    case Errc::invalid_manifest:
    case Errc::invalid_record:
    case Errc::shape_mismatch:
    case Errc::payload_mismatch:
    case Errc::bad_dimensions:
    case Errc::dim_mismatch:
    case Errc::malformed_status:
    case Errc::empty_samples:
    case Errc::empty_stream:
    case Errc::empty_index:
    case Errc::zero_vector:
      return 4;
    case Errc::duplicate_version:
    case Errc::duplicate_id:
      return 5;
    case Errc::storage_failure:
    case Errc::io_error:
      return 6;
    case Errc::corrupt_blob:
    case Errc::bad_magic:
    case Errc::truncated_stream:
    case Errc::truncated_index:
    case Errc::unsupported_version:
    case Errc::version_mismatch:
    case Errc::malformed_body:
      return 7;
    case Errc::batch_too_large:
    case Errc::queue_closed:
      return 8;
    case Errc::bind_failure:
      return 9;
    case Errc::executor_failure:
      return 10;
  }
  return 1;
}

}  // namespace v2r
