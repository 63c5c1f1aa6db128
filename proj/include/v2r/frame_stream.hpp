#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "v2r/errors.hpp"

namespace v2r {

enum class PixFmt : uint8_t { gray8 = 0, rgb8 = 1 };

// Raw frame stream: row-major, channel-interleaved frames behind a fixed
// little-endian header (magic "HYFR").
struct FrameStream {
  uint32_t width = 0;
  uint32_t height = 0;
  uint8_t channels = 0;  // 1 or 3
  PixFmt pix_fmt = PixFmt::gray8;
  uint32_t fps_num = 25;
  uint32_t fps_den = 1;
  uint32_t frame_count = 0;
  std::vector<uint8_t> payload;

  size_t frame_bytes() const {
    return static_cast<size_t>(width) * height * channels;
  }
  std::span<const uint8_t> frame(uint32_t i) const {
    return std::span<const uint8_t>(payload).subspan(static_cast<size_t>(i) * frame_bytes(),
                                                     frame_bytes());
  }
  std::span<uint8_t> frame(uint32_t i) {
    return std::span<uint8_t>(payload).subspan(static_cast<size_t>(i) * frame_bytes(),
                                               frame_bytes());
  }
};

FrameStream read_stream(const std::filesystem::path& path);
void write_stream(const std::filesystem::path& path, const FrameStream& stream);

}  // namespace v2r
