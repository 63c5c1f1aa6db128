#include <cstring>

#include "v2r/kernels.hpp"

namespace v2r::kernels {

float dot_f32_scalar(const float* a, const float* b, size_t n) {
  float acc = 0.0f;
  for (size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

float l2sqr_f32_scalar(const float* a, const float* b, size_t n) {
  float acc = 0.0f;
  for (size_t i = 0; i < n; ++i) {
    float d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

float l1_f32_scalar(const float* a, const float* b, size_t n) {
  float acc = 0.0f;
  for (size_t i = 0; i < n; ++i) {
    float d = a[i] - b[i];
    acc += d < 0.0f ? -d : d;
  }
  return acc;
}

void axpy_f32_scalar(float alpha, const float* x, float* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_f32_scalar(float* v, size_t n, float s) {
  for (size_t i = 0; i < n; ++i) v[i] *= s;
}

void u8_to_f32_scale_scalar(const uint8_t* src, float* dst, size_t n, float scale) {
  for (size_t i = 0; i < n; ++i) dst[i] = static_cast<float>(src[i]) * scale;
}

void hist32_u8_scalar(const uint8_t* px, size_t pixel_count, uint32_t channels, uint32_t* bins) {
  std::memset(bins, 0, sizeof(uint32_t) * 32 * channels);
  for (size_t i = 0; i < pixel_count; ++i)
    for (uint32_t c = 0; c < channels; ++c) bins[c * 32 + (px[i * channels + c] >> 3)]++;
}

// Four partial tables break the counter dependency chain; counts are exact,
// so this variant is integer-identical to the reference.
void hist32_u8_unrolled(const uint8_t* px, size_t pixel_count, uint32_t channels, uint32_t* bins) {
  uint32_t part[4][3 * 32];
  if (channels > 3) {
    hist32_u8_scalar(px, pixel_count, channels, bins);
    return;
  }
  std::memset(part, 0, sizeof(part));
  size_t i = 0;
  for (; i + 4 <= pixel_count; i += 4) {
    for (uint32_t c = 0; c < channels; ++c) {
      part[0][c * 32 + (px[(i + 0) * channels + c] >> 3)]++;
      part[1][c * 32 + (px[(i + 1) * channels + c] >> 3)]++;
      part[2][c * 32 + (px[(i + 2) * channels + c] >> 3)]++;
      part[3][c * 32 + (px[(i + 3) * channels + c] >> 3)]++;
    }
  }
  for (; i < pixel_count; ++i)
    for (uint32_t c = 0; c < channels; ++c) part[0][c * 32 + (px[i * channels + c] >> 3)]++;
  for (uint32_t j = 0; j < channels * 32; ++j)
    bins[j] = part[0][j] + part[1][j] + part[2][j] + part[3][j];
}

}  // namespace v2r::kernels
