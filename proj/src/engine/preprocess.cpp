#include "v2r/preprocess.hpp"

#include <cctype>

#include "v2r/kernels.hpp"

namespace v2r {

namespace {

std::vector<uint32_t> nearest_map(uint32_t dst, uint32_t src) {
  std::vector<uint32_t> map(dst);
  for (uint32_t i = 0; i < dst; ++i) {
    double pos = (static_cast<double>(i) + 0.5) * src / dst;
    uint32_t idx = static_cast<uint32_t>(pos);
    map[i] = idx >= src ? src - 1 : idx;
  }
  return map;
}

}  // namespace

Tensor resize_u8(std::span<const uint8_t> pixels, uint32_t src_h, uint32_t src_w,
                 uint32_t channels, uint32_t target_h, uint32_t target_w) {
  if (src_h < 1 || src_w < 1 || target_h < 1 || target_w < 1 || channels < 1)
    raise(Errc::bad_dimensions, "image dims must be >= 1");
  if (pixels.size() != static_cast<size_t>(src_h) * src_w * channels)
    raise(Errc::bad_dimensions, "pixel buffer does not match dims");

  Tensor out = Tensor::zeros(Dtype::u8, {target_h, target_w, channels});
  auto rows = nearest_map(target_h, src_h);
  auto cols = nearest_map(target_w, src_w);
  uint8_t* dst = out.data.data();
  for (uint32_t y = 0; y < target_h; ++y) {
    const uint8_t* src_row = pixels.data() + static_cast<size_t>(rows[y]) * src_w * channels;
    for (uint32_t x = 0; x < target_w; ++x) {
      const uint8_t* px = src_row + static_cast<size_t>(cols[x]) * channels;
      for (uint32_t c = 0; c < channels; ++c) *dst++ = px[c];
    }
  }
  return out;
}

Tensor preprocess_image(std::span<const uint8_t> pixels, uint32_t src_h, uint32_t src_w,
                        uint32_t channels, uint32_t target_h, uint32_t target_w) {
  Tensor resized = resize_u8(pixels, src_h, src_w, channels, target_h, target_w);
  Tensor out = Tensor::zeros(Dtype::f32, resized.dims);
  kernels::u8_to_f32_scale(resized.data.data(), out.f32().data(), resized.elem_count(),
                           1.0f / 255.0f);
  return out;
}

namespace {

bool is_counter_line(std::string_view line) {
  if (line.empty()) return false;
  for (char c : line)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

// HH:MM:SS,mmm --> HH:MM:SS,mmm
bool is_timing_line(std::string_view line) {
  auto stamp_at = [&](size_t off) {
    static const char pattern[] = "dd:dd:dd,ddd";
    if (off + 12 > line.size()) return false;
    for (size_t i = 0; i < 12; ++i) {
      char p = pattern[i];
      char c = line[off + i];
      if (p == 'd') {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
      } else if (c != p) {
        return false;
      }
    }
    return true;
  };
  return stamp_at(0) && line.size() >= 29 && line.substr(12, 5) == " --> " && stamp_at(17);
}

}  // namespace

std::vector<std::string> preprocess_text(std::string_view subtitle_text) {
  std::vector<std::string> tokens;
  size_t pos = 0;
  while (pos <= subtitle_text.size()) {
    size_t eol = subtitle_text.find('\n', pos);
    std::string_view line = subtitle_text.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (!is_counter_line(line) && !is_timing_line(line)) {
      size_t i = 0;
      while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i == start) continue;
        std::string_view word = line.substr(start, i - start);
        while (!word.empty() && std::ispunct(static_cast<unsigned char>(word.front())))
          word.remove_prefix(1);
        while (!word.empty() && std::ispunct(static_cast<unsigned char>(word.back())))
          word.remove_suffix(1);
        if (word.empty()) continue;
        std::string tok(word);
        for (char& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        tokens.push_back(std::move(tok));
      }
    }

    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return tokens;
}

}  // namespace v2r
