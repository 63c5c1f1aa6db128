#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

// Arithmetic inner loops used by the histogram, embedding and matching paths.
// Each kernel has a scalar reference implementation (sequential accumulation
// over ascending index — the semantics the rest of the project is specified
// against) and may have ISA-specific variants. The dispatched entry points
// are function pointers bound once at startup; V2R_KERNELS=scalar|avx2|auto
// overrides the selection.

namespace v2r::kernels {

// ---- scalar reference ----
float dot_f32_scalar(const float* a, const float* b, size_t n);
float l2sqr_f32_scalar(const float* a, const float* b, size_t n);
float l1_f32_scalar(const float* a, const float* b, size_t n);
// y += alpha * x
void axpy_f32_scalar(float alpha, const float* x, float* y, size_t n);
void scale_f32_scalar(float* v, size_t n, float s);
void u8_to_f32_scale_scalar(const uint8_t* src, float* dst, size_t n, float scale);
// 32-bin intensity histogram per channel over channel-interleaved pixels;
// bins[c*32 + (v >> 3)]. bins must hold channels*32 counters (zeroed here).
void hist32_u8_scalar(const uint8_t* px, size_t pixel_count, uint32_t channels, uint32_t* bins);

#if defined(__x86_64__)
float dot_f32_avx2(const float* a, const float* b, size_t n);
float l2sqr_f32_avx2(const float* a, const float* b, size_t n);
float l1_f32_avx2(const float* a, const float* b, size_t n);
void axpy_f32_avx2(float alpha, const float* x, float* y, size_t n);
void scale_f32_avx2(float* v, size_t n, float s);
void u8_to_f32_scale_avx2(const uint8_t* src, float* dst, size_t n, float scale);
#endif

// Unrolled multi-table histogram; exact same counts as the scalar reference.
void hist32_u8_unrolled(const uint8_t* px, size_t pixel_count, uint32_t channels, uint32_t* bins);

// ---- dispatched entry points ----
extern float (*dot_f32)(const float*, const float*, size_t);
extern float (*l2sqr_f32)(const float*, const float*, size_t);
extern float (*l1_f32)(const float*, const float*, size_t);
extern void (*axpy_f32)(float, const float*, float*, size_t);
extern void (*scale_f32)(float*, size_t, float);
extern void (*u8_to_f32_scale)(const uint8_t*, float*, size_t, float);
extern void (*hist32_u8)(const uint8_t*, size_t, uint32_t, uint32_t*);

// Name of the active variant set ("scalar" or "avx2").
std::string_view active_isa();

// Re-binds the dispatch table; throws InvalidArgument for names this build
// does not support. "auto" re-probes the CPU.
void select_isa(std::string_view name);

}  // namespace v2r::kernels
