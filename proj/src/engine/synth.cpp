#include "v2r/synth.hpp"

#include "v2r/rng.hpp"

namespace v2r {

FrameStream make_shot_stream(uint32_t frame_count, uint32_t shots, uint32_t width, uint32_t height,
                             uint64_t seed) {
  if (frame_count < 1 || shots < 1 || shots > frame_count)
    raise(Errc::invalid_argument, "need 1 <= shots <= frame_count");
  FrameStream s;
  s.width = width;
  s.height = height;
  s.channels = 3;
  s.pix_fmt = PixFmt::rgb8;
  s.frame_count = frame_count;
  s.payload.resize(s.frame_bytes() * frame_count);

  SplitMix64 g(seed);
  uint32_t per_shot = frame_count / shots;
  uint8_t color[3] = {0, 0, 0};
  for (uint32_t shot = 0; shot < shots; ++shot) {
    // jump at least 5 bins (40 intensity levels) per channel so adjacent
    // shots always split under the default 0.35 threshold
    for (auto& c : color) c = static_cast<uint8_t>(c + 40 + g.next_below(48));
    uint32_t begin = shot * per_shot;
    uint32_t end = shot + 1 == shots ? frame_count : begin + per_shot;
    for (uint32_t f = begin; f < end; ++f) {
      auto frame = s.frame(f);
      for (size_t i = 0; i < frame.size(); i += 3) {
        frame[i] = color[0];
        frame[i + 1] = color[1];
        frame[i + 2] = color[2];
      }
    }
  }
  return s;
}

FrameStream make_random_stream(uint32_t frame_count, uint32_t width, uint32_t height,
                               uint64_t seed) {
  if (frame_count < 1) raise(Errc::invalid_argument, "frame_count must be >= 1");
  FrameStream s;
  s.width = width;
  s.height = height;
  s.channels = 3;
  s.pix_fmt = PixFmt::rgb8;
  s.frame_count = frame_count;
  s.payload.resize(s.frame_bytes() * frame_count);
  SplitMix64 g(seed);
  size_t i = 0;
  for (; i + 8 <= s.payload.size(); i += 8) {
    uint64_t x = g.next();
    for (int b = 0; b < 8; ++b) s.payload[i + b] = static_cast<uint8_t>(x >> (8 * b));
  }
  for (; i < s.payload.size(); ++i) s.payload[i] = static_cast<uint8_t>(g.next());
  return s;
}

}  // namespace v2r
