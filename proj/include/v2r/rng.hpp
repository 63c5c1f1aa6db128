#pragma once

#include <cstdint>

namespace v2r {

// splitmix64; the stream behind every seeded artifact in the project
// (embedding matrices, synthetic inputs, jitter). Bit-stable across builds.
struct SplitMix64 {
  uint64_t state = 0;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [-1, 1): top 24 bits of the draw, divided by 2^23, minus 1.
  float next_signed_unit() { return static_cast<float>(next() >> 40) * (1.0f / 8388608.0f) - 1.0f; }

  // Uniform in [0, 1) with 53 bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound).
  uint64_t next_below(uint64_t bound) { return bound ? next() % bound : 0; }
};

}  // namespace v2r
