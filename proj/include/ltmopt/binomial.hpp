#pragma once

#include <cstdint>

namespace ltmopt {

// P[Bin(k, z) = u], via the saddle-point expansion (Loader's method), accurate
// to a few ulps in relative terms even for k in the millions.
double binomial_pmf(std::int64_t k, std::int64_t u, double z);

// phi_kr(z) = P[Bin(k, z) >= r]. Sums whichever tail is away from the mean with
// a ratio recurrence started from binomial_pmf. Exact 0/1 at z in {0, 1}.
// Throws InvalidArgument for r outside [0, k] or z outside [0, 1].
double binomial_tail(std::int64_t k, std::int64_t r, double z);

// Same quantity through the regularized incomplete beta function
// I_z(r, k - r + 1), evaluated by a continued fraction. Independent second
// route, used for cross-checking.
double binomial_tail_beta(std::int64_t k, std::int64_t r, double z);

// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

}  // namespace ltmopt
