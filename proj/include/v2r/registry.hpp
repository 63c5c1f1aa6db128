#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "v2r/tensor.hpp"

namespace v2r {

enum class ModelTask : uint8_t { embedding = 0, detection = 1, classification = 2, synthetic = 3 };

const char* task_name(ModelTask t);
ModelTask task_from_name(const std::string& s);

struct ModelManifest {
  std::string model_id;
  std::string name;
  ModelTask task = ModelTask::embedding;
  TensorSpec input_spec;
  TensorSpec output_spec;
  std::string weight_ref;   // 64 hex chars, or empty for weight-less executors
  uint32_t version = 0;     // 0 = assign next on registration
  uint64_t registered_at = 0;  // UTC ms
  bool tombstone = false;

  bool operator==(const ModelManifest&) const = default;
};

bool valid_model_id(const std::string& id);  // [a-z0-9_-]{1,64}

// SHA-256 of `bytes` as 64 lowercase hex chars.
std::string content_hash(std::span<const uint8_t> bytes);

// Two-layer model repository. Metadata lives in an append-only JSONL catalog
// (`catalog.jsonl`), weight blobs under `blobs/<first2hex>/<hash>` keyed by
// content hash. Single writer, lock-free readers against a catalog snapshot.
class ModelRegistry {
 public:
  explicit ModelRegistry(std::filesystem::path root);

  // Stores weights (if any) under their content hash, assigns the version,
  // appends the catalog record and returns the completed manifest. A manifest
  // with version 0 gets prior+1; an explicit version must be exactly prior+1.
  ModelManifest register_model(ModelManifest manifest,
                               std::optional<std::span<const uint8_t>> weights);

  // version = nullopt means latest. Tombstoned versions act as absent.
  ModelManifest get_model(const std::string& model_id,
                          std::optional<uint32_t> version = std::nullopt) const;

  std::vector<uint8_t> fetch_weights(const std::string& weight_ref) const;

  // Appends a tombstone record; blobs are never removed.
  void remove_model(const std::string& model_id, uint32_t version);

  // All live (non-tombstoned) manifests in registration order.
  std::vector<ModelManifest> list() const;

  // Count of catalog records loaded, including tombstones.
  size_t record_count() const;
  // Torn/corrupt trailing lines skipped during load.
  size_t skipped_lines() const;

  const std::filesystem::path& root() const { return root_; }

 private:
  void load_catalog();
  void append_record(const ModelManifest& m);
  std::filesystem::path blob_path(const std::string& hash) const;

  std::filesystem::path root_;
  mutable std::shared_mutex mu_;
  std::vector<ModelManifest> records_;  // registration order, tombstones included
  size_t skipped_ = 0;
};

}  // namespace v2r
