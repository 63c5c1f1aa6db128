#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "v2r/errors.hpp"

namespace v2r {

// Little-endian byte composition, independent of host order.
class ByteWriter {
 public:
  void u8(uint8_t v) { buf_.push_back(v); }
  void u16(uint16_t v) {
    buf_.push_back(static_cast<uint8_t>(v));
    buf_.push_back(static_cast<uint8_t>(v >> 8));
  }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  void u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<uint32_t>(v)); }
  void bytes(std::span<const uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  // u16 length prefix + UTF-8 bytes
  void str16(std::string_view s) {
    if (s.size() > 0xFFFF) raise(Errc::invalid_argument, "string exceeds u16 length prefix");
    u16(static_cast<uint16_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
  }

  size_t size() const { return buf_.size(); }
  const std::vector<uint8_t>& buffer() const { return buf_; }
  std::vector<uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<uint8_t> buf_;
};

// Bounds-checked little-endian reader. Every decode failure reports the
// offset it happened at (MalformedBody contract).
class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

  uint8_t u8() { return take(1)[0]; }
  uint16_t u16() {
    auto b = take(2);
    return static_cast<uint16_t>(b[0] | (b[1] << 8));
  }
  uint32_t u32() {
    auto b = take(4);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
  }
  uint64_t u64() {
    uint64_t lo = u32();
    uint64_t hi = u32();
    return lo | (hi << 32);
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::span<const uint8_t> bytes(size_t n) { return take(n); }
  std::string str16() {
    size_t n = u16();
    auto b = take(n);
    return std::string(reinterpret_cast<const char*>(b.data()), b.size());
  }

  size_t pos() const { return pos_; }
  size_t remaining() const { return data_.size() - pos_; }

  void expect_end() const {
    if (pos_ != data_.size())
      raise(Errc::malformed_body, "trailing bytes at offset " + std::to_string(pos_));
  }

 private:
  std::span<const uint8_t> take(size_t n) {
    if (n > data_.size() - pos_)
      raise(Errc::malformed_body, "truncated at offset " + std::to_string(data_.size()));
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

}  // namespace v2r
