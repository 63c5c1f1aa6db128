#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "v2r/tensor.hpp"

namespace v2r {

// Nearest-neighbor resize of an interleaved u8 image; source index per axis
// is floor((i + 0.5) * src / dst). Output dims [target_h, target_w, channels].
Tensor resize_u8(std::span<const uint8_t> pixels, uint32_t src_h, uint32_t src_w,
                 uint32_t channels, uint32_t target_h, uint32_t target_w);

// resize_u8 followed by u8 -> f32 scaling into [0,1] (division by 255).
Tensor preprocess_image(std::span<const uint8_t> pixels, uint32_t src_h, uint32_t src_w,
                        uint32_t channels, uint32_t target_h, uint32_t target_w);

// Subtitle text to tokens: SRT counters and timing lines stripped, lowercase,
// whitespace split, ASCII punctuation trimmed from token ends.
std::vector<std::string> preprocess_text(std::string_view subtitle_text);

}  // namespace v2r
