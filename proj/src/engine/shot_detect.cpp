#include "v2r/shot_detect.hpp"

#include "v2r/kernels.hpp"

namespace v2r {

std::vector<float> frame_histogram(const FrameStream& stream, uint32_t frame_idx) {
  const size_t pixels = static_cast<size_t>(stream.width) * stream.height;
  std::vector<uint32_t> bins(static_cast<size_t>(stream.channels) * 32);
  kernels::hist32_u8(stream.frame(frame_idx).data(), pixels, stream.channels, bins.data());
  std::vector<float> h(bins.size());
  const float inv = 1.0f / static_cast<float>(pixels);
  for (size_t i = 0; i < bins.size(); ++i) h[i] = static_cast<float>(bins[i]) * inv;
  return h;
}

std::vector<float> frame_distances(const FrameStream& stream) {
  std::vector<float> d;
  if (stream.frame_count < 2) return d;
  d.reserve(stream.frame_count - 1);
  std::vector<float> prev = frame_histogram(stream, 0);
  const float inv_c = 1.0f / static_cast<float>(stream.channels);
  for (uint32_t t = 1; t < stream.frame_count; ++t) {
    std::vector<float> cur = frame_histogram(stream, t);
    d.push_back(kernels::l1_f32(cur.data(), prev.data(), cur.size()) * inv_c);
    prev = std::move(cur);
  }
  return d;
}

std::vector<Shot> detect_shots(const FrameStream& stream, float threshold, uint32_t min_shot_len) {
  if (!(threshold > 0.0f) || threshold > 2.0f)
    raise(Errc::invalid_argument, "threshold must be in (0, 2]");
  if (min_shot_len < 1) raise(Errc::invalid_argument, "min_shot_len must be >= 1");
  if (stream.frame_count == 0) raise(Errc::empty_stream, "stream has no frames");

  std::vector<Shot> shots;
  uint32_t shot_start = 0;
  if (stream.frame_count > 1) {
    std::vector<float> prev = frame_histogram(stream, 0);
    const float inv_c = 1.0f / static_cast<float>(stream.channels);
    for (uint32_t t = 1; t < stream.frame_count; ++t) {
      std::vector<float> cur = frame_histogram(stream, t);
      float d = kernels::l1_f32(cur.data(), prev.data(), cur.size()) * inv_c;
      if (d > threshold && t - shot_start >= min_shot_len) {
        shots.push_back({shot_start, t - 1, shot_start});
        shot_start = t;
      }
      prev = std::move(cur);
    }
  }
  shots.push_back({shot_start, stream.frame_count - 1, shot_start});
  return shots;
}

}  // namespace v2r
