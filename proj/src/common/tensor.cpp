#include "v2r/tensor.hpp"

#include <cstring>
#include <sstream>

namespace v2r {

const char* dtype_name(Dtype d) { return d == Dtype::f32 ? "f32" : "u8"; }

Dtype dtype_from_name(const std::string& s) {
  if (s == "f32") return Dtype::f32;
  if (s == "u8") return Dtype::u8;
  raise(Errc::invalid_argument, "unknown dtype: " + s);
}

Tensor Tensor::zeros(Dtype dt, std::vector<uint32_t> dims) {
  Tensor t;
  t.dtype = dt;
  t.dims = std::move(dims);
  t.data.assign(t.byte_size(), 0);
  return t;
}

Tensor Tensor::from_floats(std::vector<uint32_t> dims, std::span<const float> values) {
  Tensor t = zeros(Dtype::f32, std::move(dims));
  if (values.size() != t.elem_count())
    raise(Errc::shape_mismatch, "value count does not match dims");
  std::memcpy(t.data.data(), values.data(), values.size() * sizeof(float));
  return t;
}

Tensor Tensor::from_bytes(std::vector<uint32_t> dims, std::span<const uint8_t> values) {
  Tensor t = zeros(Dtype::u8, std::move(dims));
  if (values.size() != t.elem_count())
    raise(Errc::shape_mismatch, "value count does not match dims");
  std::memcpy(t.data.data(), values.data(), values.size());
  return t;
}

TensorSpec TensorSpec::scalar_batch(Dtype dt) {
  TensorSpec s;
  s.dtype = dt;
  s.dims = {batch_dim(), fixed(1)};
  return s;
}

void TensorSpec::validate() const {
  if (dims.empty()) raise(Errc::invalid_manifest, "tensor spec has no dims");
  int batch = 0;
  for (const Dim& d : dims) {
    if (d.is_batch)
      ++batch;
    else if (d.size < 1)
      raise(Errc::invalid_manifest, "concrete dim must be >= 1");
  }
  if (batch > 1) raise(Errc::invalid_manifest, "at most one batch dim allowed");
}

bool TensorSpec::has_batch() const {
  for (const Dim& d : dims)
    if (d.is_batch) return true;
  return false;
}

std::vector<uint32_t> TensorSpec::item_dims() const {
  std::vector<uint32_t> out;
  for (const Dim& d : dims)
    if (!d.is_batch) out.push_back(d.size);
  return out;
}

bool TensorSpec::item_matches(const Tensor& t) const {
  if (t.dtype != dtype) return false;
  return t.dims == item_dims();
}

std::string TensorSpec::str() const {
  std::ostringstream os;
  os << dtype_name(dtype) << ':';
  for (size_t i = 0; i < dims.size(); ++i) {
    if (i) os << ',';
    if (dims[i].is_batch)
      os << "batch";
    else
      os << dims[i].size;
  }
  return os.str();
}

TensorSpec TensorSpec::parse(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) raise(Errc::invalid_argument, "tensor spec needs dtype:dims");
  TensorSpec spec;
  spec.dtype = dtype_from_name(text.substr(0, colon));
  std::string rest = text.substr(colon + 1);
  std::istringstream is(rest);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (tok == "batch") {
      spec.dims.push_back(batch_dim());
    } else {
      try {
        unsigned long v = std::stoul(tok);
        if (v == 0 || v > 0xFFFFFFFFUL) throw std::out_of_range("dim");
        spec.dims.push_back(fixed(static_cast<uint32_t>(v)));
      } catch (const std::exception&) {
        raise(Errc::invalid_argument, "bad dim token: " + tok);
      }
    }
  }
  spec.validate();
  return spec;
}

}  // namespace v2r
