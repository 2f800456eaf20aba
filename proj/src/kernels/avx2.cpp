#include "ltmopt/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define LTMOPT_HAVE_AVX2 1
#include <immintrin.h>
#endif

#include <cmath>
#include <limits>

namespace ltmopt::kernels {

#if LTMOPT_HAVE_AVX2
namespace {

#define LTMOPT_AVX2 __attribute__((target("avx2,fma")))

LTMOPT_AVX2 double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s = std::fma(a[i], b[i], s);
  return s;
}

LTMOPT_AVX2 void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

LTMOPT_AVX2 ActivationTally activate_avx2(const std::int32_t* counts,
                                          const std::int32_t* thresholds,
                                          const std::int32_t* weights, std::uint8_t* out,
                                          std::size_t n) {
  ActivationTally t;
  const __m256i one = _mm256_set1_epi32(1);
  __m256i wsum = _mm256_setzero_si256();  // four 64-bit lanes
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i c = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(counts + i));
    const __m256i r = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(thresholds + i));
    const __m256i w = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(weights + i));
    // active where !(r > c)
    const __m256i below = _mm256_cmpgt_epi32(r, c);
    const __m256i on = _mm256_andnot_si256(below, one);
    const __m256i won = _mm256_andnot_si256(below, w);
    wsum = _mm256_add_epi64(wsum, _mm256_cvtepi32_epi64(_mm256_castsi256_si128(won)));
    wsum = _mm256_add_epi64(wsum, _mm256_cvtepi32_epi64(_mm256_extracti128_si256(won, 1)));
    const __m128i p16 =
        _mm_packs_epi32(_mm256_castsi256_si128(on), _mm256_extracti128_si256(on, 1));
    const __m128i p8 = _mm_packus_epi16(p16, p16);
    _mm_storel_epi64(reinterpret_cast<__m128i*>(out + i), p8);
    const int mask = _mm256_movemask_ps(_mm256_castsi256_ps(below));
    t.active += 8 - __builtin_popcount(static_cast<unsigned>(mask));
  }
  alignas(32) std::int64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), wsum);
  t.weighted = lanes[0] + lanes[1] + lanes[2] + lanes[3];
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

LTMOPT_AVX2 double min_difference_avx2(const double* a, const double* b, std::size_t n) {
  __m256d m = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    m = _mm256_min_pd(m, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = lanes[0];
  for (int l = 1; l < 4; ++l) r = lanes[l] < r ? lanes[l] : r;
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    if (d < r) r = d;
  }
  return r;
}

#undef LTMOPT_AVX2

constexpr KernelTable kAvx2{"avx2", &dot_avx2, &axpy_avx2, &activate_avx2, &min_difference_avx2};

}  // namespace

const KernelTable* avx2_table() {
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &kAvx2 : nullptr;
}

#else

const KernelTable* avx2_table() { return nullptr; }

#endif

}  // namespace ltmopt::kernels
