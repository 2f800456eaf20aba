#pragma once

// Data-parallel inner loops with a scalar reference and SIMD variants chosen
// at runtime. Every variant performs the same floating-point operations in the
// same order (four interleaved FMA accumulators for reductions, one FMA per
// element for axpy), so results are bit-identical whichever table is active.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace ltmopt::kernels {

struct ActivationTally {
  std::int64_t active = 0;    // number of i with counts[i] >= thresholds[i]
  std::int64_t weighted = 0;  // sum of weights[i] over those i
};

struct KernelTable {
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[i] = counts[i] >= thresholds[i]
  ActivationTally (*activate)(const std::int32_t* counts, const std::int32_t* thresholds,
                              const std::int32_t* weights, std::uint8_t* out, std::size_t n);
  // min_i (a[i] - b[i]); +inf for n == 0
  double (*min_difference)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the variant is not compiled in or not supported by this CPU.
const KernelTable* avx2_table();
const KernelTable* neon_table();

// Tables usable on this machine, scalar first.
std::vector<const KernelTable*> available_tables();

// Best supported table, overridable with LTMOPT_KERNELS=scalar|avx2|neon.
const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

inline double min_difference(std::span<const double> a, std::span<const double> b) {
  return active().min_difference(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

}  // namespace ltmopt::kernels
