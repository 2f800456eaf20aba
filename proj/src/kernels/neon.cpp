#include "ltmopt/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>
#endif

#include <cmath>
#include <limits>

namespace ltmopt::kernels {

#if defined(__aarch64__)
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0);  // lanes 0, 1
  float64x2_t hi = vdupq_n_f64(0.0);  // lanes 2, 3
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vfmaq_f64(lo, vld1q_f64(a + i), vld1q_f64(b + i));
    hi = vfmaq_f64(hi, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) +
             (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
  for (; i < n; ++i) s = std::fma(a[i], b[i], s);
  return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

ActivationTally activate_neon(const std::int32_t* counts, const std::int32_t* thresholds,
                              const std::int32_t* weights, std::uint8_t* out, std::size_t n) {
  ActivationTally t;
  int64x2_t wsum = vdupq_n_s64(0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const uint32x4_t on = vcgeq_s32(vld1q_s32(counts + i), vld1q_s32(thresholds + i));
    const int32x4_t won = vandq_s32(vld1q_s32(weights + i), vreinterpretq_s32_u32(on));
    wsum = vpadalq_s32(wsum, won);
    const uint32x4_t bits = vshrq_n_u32(on, 31);
    out[i + 0] = static_cast<std::uint8_t>(vgetq_lane_u32(bits, 0));
    out[i + 1] = static_cast<std::uint8_t>(vgetq_lane_u32(bits, 1));
    out[i + 2] = static_cast<std::uint8_t>(vgetq_lane_u32(bits, 2));
    out[i + 3] = static_cast<std::uint8_t>(vgetq_lane_u32(bits, 3));
    t.active += vaddvq_u32(bits);
  }
  t.weighted = vgetq_lane_s64(wsum, 0) + vgetq_lane_s64(wsum, 1);
  for (; i < n; ++i) {
    const bool on = counts[i] >= thresholds[i];
    out[i] = on ? 1 : 0;
    if (on) {
      ++t.active;
      t.weighted += weights[i];
    }
  }
  return t;
}

double min_difference_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t m = vdupq_n_f64(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vminq_f64(m, vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  double r = vminvq_f64(m);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    if (d < r) r = d;
  }
  return r;
}

constexpr KernelTable kNeon{"neon", &dot_neon, &axpy_neon, &activate_neon, &min_difference_neon};

}  // namespace

const KernelTable* neon_table() { return &kNeon; }

#else

const KernelTable* neon_table() { return nullptr; }

#endif

}  // namespace ltmopt::kernels
