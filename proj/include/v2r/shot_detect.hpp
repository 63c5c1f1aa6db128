#pragma once

#include <cstdint>
#include <vector>

#include "v2r/frame_stream.hpp"

namespace v2r {

// Maximal run of visually continuous frames; keyframe is the single frame
// processed downstream.
struct Shot {
  uint32_t start_frame = 0;  // inclusive
  uint32_t end_frame = 0;    // inclusive
  uint32_t keyframe = 0;

  bool operator==(const Shot&) const = default;
};

// Pixel-count-normalized 32-bin intensity histogram per channel.
std::vector<float> frame_histogram(const FrameStream& stream, uint32_t frame_idx);

// L1 distance between consecutive frame histograms averaged over channels;
// d(t) in [0,2] for t = 1..frame_count-1.
std::vector<float> frame_distances(const FrameStream& stream);

// Opens a new shot at frame t when d(t) > threshold and the current shot
// already spans min_shot_len frames. Keyframe = first frame of each shot.
// Shots partition [0, frame_count).
std::vector<Shot> detect_shots(const FrameStream& stream, float threshold = 0.35f,
                               uint32_t min_shot_len = 2);

}  // namespace v2r
