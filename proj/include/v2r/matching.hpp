#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "v2r/errors.hpp"
#include "v2r/feature.hpp"

namespace v2r {

enum class Metric : uint8_t { cosine = 0, l2 = 1 };

const char* metric_name(Metric m);
Metric metric_from_name(const std::string& s);

struct Neighbor {
  uint64_t id = 0;
  float score = 0.0f;  // cosine: dot product (higher better); l2: squared distance (lower better)

  bool operator==(const Neighbor&) const = default;
};

struct MatchResult {
  uint64_t query_id = 0;
  std::vector<Neighbor> neighbors;  // best-first, ties to the smaller id
  Metric metric = Metric::cosine;
};

// Exact top-k scan over all stored vectors. Cosine indexes L2-normalize on
// insert and reject zero vectors; queries are normalized before scanning.
// Searches run against an immutable snapshot; adds publish a new one.
class FlatIndex {
 public:
  FlatIndex(uint32_t dim, Metric metric);
  FlatIndex(const FlatIndex& other);
  FlatIndex& operator=(const FlatIndex&) = delete;

  uint32_t dim() const { return dim_; }
  Metric metric() const { return metric_; }
  size_t size() const;

  // All-or-nothing: validates every vector before any is committed.
  size_t add(std::span<const FeatureVector> vectors);

  // Exact top-k; k >= 1. threads = 0 picks the hardware concurrency; results
  // are identical for any thread count.
  MatchResult search(const FeatureVector& query, uint32_t k, uint32_t threads = 1) const;

  void save(const std::filesystem::path& path) const;
  static FlatIndex load(const std::filesystem::path& path);

  std::vector<uint64_t> ids() const;
  // Stored values of the item at insertion position `pos`.
  std::vector<float> vector_at(size_t pos) const;

 private:
  struct Store {
    std::vector<uint64_t> ids;     // insertion order
    std::vector<float> values;     // ids.size() * dim
    std::unordered_set<uint64_t> id_set;
  };

  std::shared_ptr<const Store> snapshot() const;

  uint32_t dim_;
  Metric metric_;
  mutable std::mutex mu_;  // guards store_ pointer swaps
  std::shared_ptr<const Store> store_;
};

// ---- feature vector files ----
// `HYFV`: header (magic, version u16, dim u32) + appended records
// (id u64, dim f32 values). Same record layout as the index file.

class FeatureFileWriter {
 public:
  // Creates the file (writing the header) or opens an existing one for
  // append, validating its header against `dim`.
  FeatureFileWriter(std::filesystem::path path, uint32_t dim);

  void append(const FeatureVector& f);
  void flush();
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  uint32_t dim_;
  std::ofstream out_;
};

std::vector<FeatureVector> read_feature_file(const std::filesystem::path& path);

}  // namespace v2r
