#include "ltmopt/kernels.hpp"

#include <cmath>
#include <limits>

namespace ltmopt::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) acc[l] = std::fma(a[i + l], b[i + l], acc[l]);
  }
  double s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < n; ++i) s = std::fma(a[i], b[i], s);
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

ActivationTally activate_scalar(const std::int32_t* counts, const std::int32_t* thresholds,
                                const std::int32_t* weights, std::uint8_t* out, std::size_t n) {
  ActivationTally t;
  for (std::size_t i = 0; i < n; ++i) {
    const bool on = counts[i] >= thresholds[i];
    out[i] = on ? 1 : 0;
    if (on) {
      ++t.active;
      t.weighted += weights[i];
    }
  }
  return t;
}

double min_difference_scalar(const double* a, const double* b, std::size_t n) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    if (d < m) m = d;
  }
  return m;
}

constexpr KernelTable kScalar{"scalar", &dot_scalar, &axpy_scalar, &activate_scalar,
                              &min_difference_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace ltmopt::kernels
