#pragma once

#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "v2r/errors.hpp"

namespace v2r {

enum class Dtype : uint8_t { f32 = 0, u8 = 1 };

inline size_t dtype_size(Dtype d) { return d == Dtype::f32 ? 4 : 1; }
const char* dtype_name(Dtype d);
Dtype dtype_from_name(const std::string& s);

// Dense row-major tensor; raw bytes are little-endian f32 when dtype==f32.
struct Tensor {
  Dtype dtype = Dtype::f32;
  std::vector<uint32_t> dims;
  std::vector<uint8_t> data;

  static Tensor zeros(Dtype dt, std::vector<uint32_t> dims);
  static Tensor from_floats(std::vector<uint32_t> dims, std::span<const float> values);
  static Tensor from_bytes(std::vector<uint32_t> dims, std::span<const uint8_t> values);

  size_t elem_count() const {
    size_t n = 1;
    for (uint32_t d : dims) n *= d;
    return dims.empty() ? 0 : n;
  }
  size_t byte_size() const { return elem_count() * dtype_size(dtype); }

  std::span<const float> f32() const {
    check(Dtype::f32);
    return {reinterpret_cast<const float*>(data.data()), elem_count()};
  }
  std::span<float> f32() {
    check(Dtype::f32);
    return {reinterpret_cast<float*>(data.data()), elem_count()};
  }
  std::span<const uint8_t> u8() const {
    check(Dtype::u8);
    return {data.data(), elem_count()};
  }
  std::span<uint8_t> u8() {
    check(Dtype::u8);
    return {data.data(), elem_count()};
  }

  bool operator==(const Tensor&) const = default;

 private:
  void check(Dtype want) const {
    if (dtype != want) raise(Errc::shape_mismatch, "tensor dtype mismatch");
  }
};

// Shape contract for a model input/output: dtype plus dims where at most one
// dim is the symbolic batch axis.
struct TensorSpec {
  struct Dim {
    bool is_batch = false;
    uint32_t size = 0;

    bool operator==(const Dim&) const = default;
  };

  Dtype dtype = Dtype::f32;
  std::vector<Dim> dims;

  static TensorSpec scalar_batch(Dtype dt);  // dims = [batch, 1]: one value per item
  static Dim batch_dim() { return Dim{true, 0}; }
  static Dim fixed(uint32_t n) { return Dim{false, n}; }

  void validate() const;  // throws InvalidManifest on violation

  // True when a single (batch-less) item tensor conforms: dtype equal and
  // concrete dims match in order, the batch axis removed.
  bool item_matches(const Tensor& t) const;

  // Concrete dims with the batch axis removed.
  std::vector<uint32_t> item_dims() const;

  bool has_batch() const;

  // Compact text form, e.g. "u8:batch,64,64,3" (used by the CLI).
  std::string str() const;
  static TensorSpec parse(const std::string& text);

  bool operator==(const TensorSpec&) const = default;
};

}  // namespace v2r
