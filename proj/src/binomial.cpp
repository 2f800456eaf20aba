#include "ltmopt/binomial.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "ltmopt/error.hpp"

namespace ltmopt {

namespace {

// stirlerr(n) = log(n!) - log(sqrt(2 pi n) (n/e)^n).
double stirlerr(double n) {
  static const std::array<double, 16> table = [] {
    std::array<double, 16> t{};
    t[0] = 0.0;
    for (int i = 1; i < 16; ++i) {
      const long double x = i;
      t[i] = static_cast<double>(std::lgamma(x + 1.0L) - (x + 0.5L) * std::log(x) + x -
                                 0.5L * std::log(2.0L * std::numbers::pi_v<long double>));
    }
    return t;
  }();
  if (n < 16.0) return table[static_cast<int>(n)];
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  const double nn = n * n;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// Deviance term x log(x / np) + np - x, without cancellation near x == np.
double bd0(double x, double np) {
  if (std::abs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

void check_args(std::int64_t k, std::int64_t r, double z) {
  if (k < 0 || r < 0 || r > k) {
    throw InvalidArgument("binomial tail needs 0 <= r <= k (got k=" + std::to_string(k) +
                          ", r=" + std::to_string(r) + ")");
  }
  if (!(z >= 0.0 && z <= 1.0)) throw InvalidArgument("binomial tail needs z in [0, 1]");
}

}  // namespace

double binomial_pmf(std::int64_t k, std::int64_t u, double z) {
  if (u < 0 || u > k) return 0.0;
  const double p = z;
  const double q = 1.0 - z;
  if (p == 0.0) return u == 0 ? 1.0 : 0.0;
  if (q == 0.0) return u == k ? 1.0 : 0.0;
  const auto n = static_cast<double>(k);
  const auto x = static_cast<double>(u);
  if (u == 0) {
    const double lc = p < 0.1 ? -bd0(n, n * q) - n * p : n * std::log(q);
    return std::exp(lc);
  }
  if (u == k) {
    const double lc = q < 0.1 ? -bd0(n, n * p) - n * q : n * std::log(p);
    return std::exp(lc);
  }
  const double lc =
      stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(x, n * p) - bd0(n - x, n * q);
  const double lf = std::log(2.0 * std::numbers::pi) + std::log(x) + std::log1p(-x / n);
  return std::exp(lc - 0.5 * lf);
}

double binomial_tail(std::int64_t k, std::int64_t r, double z) {
  check_args(k, r, z);
  if (r == 0) return 1.0;
  if (z == 0.0) return 0.0;
  if (z == 1.0) return 1.0;
  const double kd = static_cast<double>(k);
  const double odds = z / (1.0 - z);
  const auto mode = static_cast<std::int64_t>(std::floor((kd + 1.0) * z));
  constexpr double kStop = 1e-17;

  if (static_cast<double>(r) > kd * z) {
    // Upper tail summed upward; terms decrease once u passes the mode.
    double term = binomial_pmf(k, r, z);
    double sum = term;
    for (std::int64_t u = r; u < k; ++u) {
      const double ratio = static_cast<double>(k - u) / static_cast<double>(u + 1) * odds;
      term *= ratio;
      sum += term;
      if (u + 1 >= mode && ratio < 1.0 && term * ratio / (1.0 - ratio) < kStop * sum) break;
      if (term == 0.0) break;
    }
    return sum < 1.0 ? sum : 1.0;
  }
  // r <= k z: the result is at least one half; subtract the lower tail
  // P[X <= r - 1], summed downward from r - 1 where terms decrease.
  double term = binomial_pmf(k, r - 1, z);
  double lower = term;
  const double inv_odds = (1.0 - z) / z;
  for (std::int64_t u = r - 1; u > 0; --u) {
    const double ratio = static_cast<double>(u) / static_cast<double>(k - u + 1) * inv_odds;
    term *= ratio;
    lower += term;
    if (ratio < 1.0 && term * ratio / (1.0 - ratio) < kStop * lower) break;
    if (term == 0.0) break;
  }
  const double out = 1.0 - lower;
  return out > 0.0 ? out : 0.0;
}

namespace {

// Continued fraction for I_x(a, b) (modified Lentz), valid for x < (a+1)/(a+b+2).
double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  const int max_iter = 10000 + static_cast<int>(20.0 * std::sqrt(a + b));
  for (int m = 1; m <= max_iter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw Error("incomplete beta continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw InvalidArgument("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("incomplete beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double binomial_tail_beta(std::int64_t k, std::int64_t r, double z) {
  check_args(k, r, z);
  if (r == 0) return 1.0;
  return regularized_incomplete_beta(static_cast<double>(r), static_cast<double>(k - r + 1), z);
}

}  // namespace ltmopt
