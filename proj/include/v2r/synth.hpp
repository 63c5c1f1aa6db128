#pragma once

#include <cstdint>

#include "v2r/frame_stream.hpp"

namespace v2r {

// Stream of `shots` uniform-length segments; every frame in a segment is one
// constant color, adjacent segments differ in all channels by several
// histogram bins. frame_count need not divide evenly (the last shot absorbs
// the remainder).
FrameStream make_shot_stream(uint32_t frame_count, uint32_t shots, uint32_t width, uint32_t height,
                             uint64_t seed);

// Every pixel random (seeded); used for scan-throughput measurements.
FrameStream make_random_stream(uint32_t frame_count, uint32_t width, uint32_t height,
                               uint64_t seed);

}  // namespace v2r
