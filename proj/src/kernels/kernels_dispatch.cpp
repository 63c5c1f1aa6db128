#include <cstdlib>
#include <string>

#include "v2r/errors.hpp"
#include "v2r/kernels.hpp"

namespace v2r::kernels {

float (*dot_f32)(const float*, const float*, size_t) = dot_f32_scalar;
float (*l2sqr_f32)(const float*, const float*, size_t) = l2sqr_f32_scalar;
float (*l1_f32)(const float*, const float*, size_t) = l1_f32_scalar;
void (*axpy_f32)(float, const float*, float*, size_t) = axpy_f32_scalar;
void (*scale_f32)(float*, size_t, float) = scale_f32_scalar;
void (*u8_to_f32_scale)(const uint8_t*, float*, size_t, float) = u8_to_f32_scale_scalar;
void (*hist32_u8)(const uint8_t*, size_t, uint32_t, uint32_t*) = hist32_u8_scalar;

namespace {

std::string g_active = "scalar";

void bind_scalar() {
  dot_f32 = dot_f32_scalar;
  l2sqr_f32 = l2sqr_f32_scalar;
  l1_f32 = l1_f32_scalar;
  axpy_f32 = axpy_f32_scalar;
  scale_f32 = scale_f32_scalar;
  u8_to_f32_scale = u8_to_f32_scale_scalar;
  hist32_u8 = hist32_u8_scalar;
  g_active = "scalar";
}

#if defined(__x86_64__)
bool cpu_has_avx2_fma() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

void bind_avx2() {
  dot_f32 = dot_f32_avx2;
  l2sqr_f32 = l2sqr_f32_avx2;
  l1_f32 = l1_f32_avx2;
  axpy_f32 = axpy_f32_avx2;
  scale_f32 = scale_f32_avx2;
  u8_to_f32_scale = u8_to_f32_scale_avx2;
  hist32_u8 = hist32_u8_unrolled;
  g_active = "avx2";
}
#endif

void bind_auto() {
#if defined(__x86_64__)
  if (cpu_has_avx2_fma()) {
    bind_avx2();
    return;
  }
#endif
  bind_scalar();
}

struct Init {
  Init() {
    const char* env = std::getenv("V2R_KERNELS");
    if (env == nullptr || std::string(env) == "auto") {
      bind_auto();
    } else if (std::string(env) == "scalar") {
      bind_scalar();
    } else {
      // unknown names fall back to auto rather than aborting startup
      bind_auto();
#if defined(__x86_64__)
      if (std::string(env) == "avx2" && cpu_has_avx2_fma()) bind_avx2();
#endif
    }
  }
};

Init g_init;

}  // namespace

std::string_view active_isa() { return g_active; }

void select_isa(std::string_view name) {
  if (name == "auto") {
    bind_auto();
    return;
  }
  if (name == "scalar") {
    bind_scalar();
    return;
  }
#if defined(__x86_64__)
  if (name == "avx2") {
    if (!cpu_has_avx2_fma()) raise(Errc::invalid_argument, "cpu lacks avx2/fma");
    bind_avx2();
    return;
  }
#endif
  raise(Errc::invalid_argument, "unknown kernel set: " + std::string(name));
}

}  // namespace v2r::kernels
