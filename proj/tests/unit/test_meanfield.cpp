#include <doctest.h>

#include <cmath>

#include "ltmopt/error.hpp"
#include "ltmopt/meanfield.hpp"
#include "ltmopt/rng.hpp"
#include "oracles.hpp"

using namespace ltmopt;

namespace {

AgentType linear_type(int d, int k, int r) { return {d, k, r, cost_rules::linear()(d, k, r)}; }

// psi and phi straight from the definition, through the oracle tail.
double psi_oracle(const Statistics& p, double z) {
  long double s = 0;
  for (std::size_t w = 0; w < p.size(); ++w) s += p.mass[w] * oracle::binomial_tail(p.types[w].k, p.types[w].r, z);
  return static_cast<double>(s);
}

double phi_oracle(const Statistics& p, double z) {
  long double s = 0;
  long double dsum = 0;
  for (std::size_t w = 0; w < p.size(); ++w) {
    s += p.mass[w] * p.types[w].d * oracle::binomial_tail(p.types[w].k, p.types[w].r, z);
    dsum += p.mass[w] * p.types[w].d;
  }
  return static_cast<double>(s / dsum);
}

Statistics random_stats(Rng& rng, int max_types, int max_k) {
  std::vector<std::pair<AgentType, double>> entries;
  const int types = 1 + static_cast<int>(rng.below(max_types));
  double total = 0;
  for (int t = 0; t < types; ++t) {
    const int k = 1 + static_cast<int>(rng.below(max_k));
    const int d = 1 + static_cast<int>(rng.below(max_k));
    const double m = rng.uniform() + 0.05;
    entries.emplace_back(linear_type(d, k, static_cast<int>(rng.below(k + 1))), m);
    total += m;
  }
  for (auto& e : entries) e.second /= total;
  return make_statistics(entries);
}

StatIntervention random_xi(Rng& rng, const Statistics& p0) {
  auto xi = null_intervention(p0);
  for (std::size_t w = 0; w < p0.size(); ++w) {
    double left = p0.mass[w];
    for (std::size_t eta = 1; eta < xi.xi[w].size(); ++eta) {
      const double move = left * rng.uniform() * 0.6;
      xi.xi[w][eta] = move;
      left -= move;
    }
    xi.xi[w][0] = left;
  }
  return xi;
}

}  // namespace

TEST_CASE("psi and phi examples") {
  const auto r0 = make_statistics({{linear_type(3, 3, 0), 1.0}});
  for (double z : {0.0, 0.4, 1.0}) {
    CHECK(psi(r0, z) == 1.0);
    CHECK(phi(r0, z) == 1.0);
  }
  const auto one = make_statistics({{linear_type(2, 2, 1), 1.0}});
  CHECK(psi(one, 0.5) == doctest::Approx(0.75));
  CHECK(phi(one, 0.5) == doctest::Approx(0.75));
  const auto two = make_statistics({{linear_type(1, 1, 1), 2.0 / 3}, {linear_type(2, 2, 2), 1.0 / 3}});
  CHECK(psi(two, 0.5) == doctest::Approx(5.0 / 12));
  CHECK(phi(two, 0.5) == doctest::Approx(0.375));
  const auto sinks = make_statistics({{linear_type(0, 2, 1), 1.0}});
  CHECK_THROWS_AS(phi(sinks, 0.5), InvalidArgument);
}

TEST_CASE("curve evaluation matches the oracle and the pointwise path") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = random_stats(rng, 8, 12);
    const MeanFieldCurve curve(p);
    std::vector<double> z(101), ps(101), ph(101);
    for (int i = 0; i <= 100; ++i) z[i] = i / 100.0;
    curve.evaluate(z, ps, ph);
    for (int i = 0; i <= 100; ++i) {
      CHECK(ps[i] == doctest::Approx(psi_oracle(p, z[i])).epsilon(1e-12));
      CHECK(ph[i] == doctest::Approx(phi_oracle(p, z[i])).epsilon(1e-12));
      CHECK(std::abs(ps[i] - curve.psi(z[i])) <= 1e-14);
    }
  }
}

TEST_CASE("curves are non-decreasing and inside [0, 1]") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_stats(rng, 6, 15);
    const MeanFieldCurve curve(p);
    double prev_psi = curve.psi(0), prev_phi = curve.phi(0);
    for (int i = 1; i <= 1000; ++i) {
      const double z = i / 1000.0;
      const double a = curve.psi(z), b = curve.phi(z);
      CHECK(a >= prev_psi - 1e-12);
      CHECK(b >= prev_phi - 1e-12);
      CHECK(a >= 0.0);
      CHECK(a <= 1.0);
      CHECK(b >= 0.0);
      CHECK(b <= 1.0);
      prev_psi = a;
      prev_phi = b;
    }
  }
}

TEST_CASE("coefficient examples") {
  const auto w = linear_type(2, 2, 2);
  CHECK(coeff_a(w, 1, 0.5, 2.0) == doctest::Approx(0.5));
  CHECK(coeff_a(w, 2, 0.0, 2.0) == doctest::Approx(1.0));
  CHECK(coeff_a(linear_type(3, 5, 4), 2, 0.0, 2.5) == 0.0);
  CHECK(coeff_a(linear_type(3, 5, 4), 4, 0.0, 2.5) == doctest::Approx(3 / 2.5));
  CHECK_THROWS_AS(coeff_a(w, 0, 0.5, 2.0), InvalidArgument);
  CHECK_THROWS_AS(coeff_a(w, 3, 0.5, 2.0), InvalidArgument);
}

TEST_CASE("decomposition examples") {
  const auto one = make_statistics({{linear_type(2, 2, 2), 1.0}});
  auto xi = null_intervention(one);
  CHECK(phi_decomposed(one, xi, 0.5) == doctest::Approx(phi(one, 0.5)));
  xi.xi[0] = {0.7, 0.0, 0.3};
  CHECK(phi_decomposed(one, xi, 0.5) == doctest::Approx(0.475));
  CHECK(phi(post_statistics(one, xi), 0.5) == doctest::Approx(0.475));
  xi.xi[0] = {0.7, 0.3, 0.0};
  CHECK(phi_decomposed(one, xi, 0.5) == doctest::Approx(0.40));
}

TEST_CASE("decomposition identity and non-negative coefficients") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p0 = random_stats(rng, 10, 8);
    const auto xi = random_xi(rng, p0);
    const auto post = post_statistics(p0, xi);
    for (int i = 0; i <= 100; ++i) {
      const double z = i / 100.0;
      CHECK(std::abs(phi_decomposed(p0, xi, z) - phi(post, z)) <= 1e-10);
    }
    for (const auto& w : p0.types) {
      for (int eta = 1; eta <= w.r; ++eta) CHECK(coeff_a(w, eta, rng.uniform(), p0) >= 0.0);
    }
  }
}

TEST_CASE("recursion") {
  const auto r0 = make_statistics({{linear_type(2, 2, 0), 1.0}});
  const auto a = recursion(r0, 10);
  CHECK(a.converged);
  CHECK(a.z[1] == 1.0);
  CHECK(a.y[1] == 1.0);

  const auto one = make_statistics({{linear_type(2, 2, 1), 1.0}});
  const auto zero = recursion(one, 10);
  CHECK(zero.converged);
  CHECK(zero.z.size() == 1);
  CHECK(zero.z[0] == 0.0);

  const auto from = recursion(one, 200, 0.1, 0.0);
  CHECK(from.z[1] == doctest::Approx(0.19));
  CHECK(from.z[2] == doctest::Approx(0.3439));
  CHECK(from.z.back() == doctest::Approx(1.0));
  for (std::size_t t = 1; t < from.z.size(); ++t) CHECK(from.z[t] >= from.z[t - 1]);
}

TEST_CASE("derivative bound") {
  CHECK(derivative_bound(make_statistics({{linear_type(3, 3, 1), 1.0}})) == 49.0);
  CHECK(derivative_bound(make_statistics({{linear_type(1, 1, 1), 1.0}})) == 5.0);
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) CHECK(derivative_bound(random_stats(rng, 5, 6)) >= 1.0);
}

TEST_CASE("psi inverse") {
  const auto one = make_statistics({{linear_type(2, 2, 1), 1.0}});
  CHECK(psi_inverse(one, 0.0) == 0.0);
  CHECK(psi_inverse(one, 0.75) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(psi_inverse(one, 1.0) == 1.0);
  const auto r0 = make_statistics({{linear_type(2, 2, 0), 1.0}});
  CHECK(psi_inverse(r0, 1.0) == 0.0);
  CHECK_THROWS_AS(psi_inverse(one, 1.5), InvalidArgument);
}

TEST_CASE("curve table") {
  const auto one = make_statistics({{linear_type(2, 2, 1), 1.0}});
  const auto rows = curve_table(one, 4);
  REQUIRE(rows.size() == 5);
  CHECK(rows[2].z == 0.5);
  CHECK(rows[2].psi == doctest::Approx(0.75));
}
