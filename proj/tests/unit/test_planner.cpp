#include <doctest.h>

#include <cmath>

#include "ltmopt/error.hpp"
#include "ltmopt/meanfield.hpp"
#include "ltmopt/planner.hpp"
#include "ltmopt/rng.hpp"

using namespace ltmopt;

namespace {

AgentType linear_type(int d, int k, int r) { return {d, k, r, cost_rules::linear()(d, k, r)}; }

PlannerConfig config(double eps, std::size_t n, std::optional<double> delta) {
  PlannerConfig c;
  c.eps = eps;
  c.grid_n = n;
  c.delta = delta;
  return c;
}

// Balanced random statistics with d = k per type and small degrees.
Statistics small_instance(Rng& rng, int k_max) {
  std::vector<std::pair<AgentType, double>> entries;
  const int types = 2 + static_cast<int>(rng.below(4));
  double total = 0;
  for (int t = 0; t < types; ++t) {
    const int k = 1 + static_cast<int>(rng.below(k_max));
    const double m = rng.uniform() + 0.1;
    entries.emplace_back(linear_type(k, k, 1 + static_cast<int>(rng.below(k))), m);
    total += m;
  }
  for (auto& e : entries) e.second /= total;
  return make_statistics(entries);
}

}  // namespace

TEST_CASE("alpha_eps and delta_N") {
  const auto two = make_statistics({{linear_type(2, 2, 1), 0.5}, {linear_type(6, 6, 2), 0.5}});
  CHECK(alpha_eps(two, 0.1) == doctest::Approx(0.05));
  const auto regular = make_statistics({{linear_type(3, 3, 1), 1.0}});
  CHECK(alpha_eps(regular, 1.0) == doctest::Approx(1.0));
  CHECK(alpha_eps(regular, 1e-9) == doctest::Approx(1e-9));
  CHECK(delta_N(regular, 0.3, 100) == doctest::Approx(0.7 / 200 * 49));
  CHECK(delta_N(regular, 0.3, 200) == doctest::Approx(delta_N(regular, 0.3, 100) / 2));
  // alpha = 0.1 with <p0, d> = 3, d_min = 3 means eps = 0.1
  CHECK(delta_N(regular, 0.1, 100) == doctest::Approx(0.2205));

  const auto sinks = make_statistics({{linear_type(0, 2, 1), 0.5}, {linear_type(4, 2, 1), 0.5}});
  CHECK_THROWS_AS(alpha_eps(sinks, 0.1), InvalidArgument);
  CHECK(alpha_eps(sinks, 0.1, true) == 0.0);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(config(0.0, 10, 0.1).validate(), InvalidArgument);
  CHECK_THROWS_AS(config(1.5, 10, 0.1).validate(), InvalidArgument);
  CHECK_THROWS_AS(config(0.1, 0, 0.1).validate(), InvalidArgument);
  CHECK_THROWS_AS(config(0.1, 10, -0.1).validate(), InvalidArgument);
  CHECK(config(0.1, 10, 0.1).audit_points() == 100);
}

TEST_CASE("LP shape") {
  const auto one = make_statistics({{linear_type(2, 2, 2), 1.0}});
  const auto lp = build_lp(one, config(0.1, 2, 0.05));
  CHECK(lp.model.variable_count() == 2);
  CHECK(lp.grid.size() == 3);
  CHECK(lp.model.row_count() == 4);
  CHECK(lp.budget_type.size() == 1);

  const auto zero = make_statistics({{linear_type(2, 2, 0), 1.0}});
  const auto lp0 = build_lp(zero, config(0.1, 10, 0.05));
  CHECK(lp0.model.variable_count() == 0);
  CHECK(lp0.grid.size() == 11);

  const auto restricted = build_lp(one, [] {
    auto c = config(0.1, 2, 0.05);
    c.full_reduction_only = true;
    return c;
  }());
  CHECK(restricted.model.variable_count() == 1);
  CHECK(restricted.columns[0].eta == 2);
}

TEST_CASE("grid coefficients agree with coeff_a") {
  Rng rng(12);
  const auto p0 = small_instance(rng, 7);
  const auto lp = build_lp(p0, config(0.1, 20, 0.05));
  const double mean_d = moment(p0, Moment::d);
  for (std::size_t i = 0; i < lp.grid.size(); ++i) {
    for (const auto& t : lp.model.row(i).terms) {
      const auto& col = lp.columns[t.var];
      CHECK(t.coef == doctest::Approx(coeff_a(p0.types[col.type], col.eta, lp.grid[i], mean_d)).epsilon(1e-12));
    }
    CHECK(lp.grid_rhs[i] == doctest::Approx(lp.grid[i] + 0.05 - phi(p0, lp.grid[i])));
  }
}

TEST_CASE("zero thresholds need no intervention") {
  const auto zero = make_statistics({{linear_type(2, 2, 0), 1.0}});
  const auto res = plan(zero, config(0.1, 10, 0.05));
  REQUIRE(res.feasible);
  CHECK(res.cost == 0.0);
  CHECK(res.xi.xi[0][0] == 1.0);
}

TEST_CASE("single type seeding floor at z = 0") {
  const auto one = make_statistics({{linear_type(3, 3, 3), 1.0}});
  const auto lp = build_lp(one, config(0.1, 50, 0.01));
  // only eta = 3 acts at z = 0, with a = d / <d> = 1
  REQUIRE(lp.model.row(0).terms.size() == 1);
  CHECK(lp.columns[lp.model.row(0).terms[0].var].eta == 3);
  CHECK(lp.model.row(0).terms[0].coef == doctest::Approx(1.0));
  const auto res = plan(one, config(0.1, 50, 0.01));
  REQUIRE(res.feasible);
  CHECK(res.xi.xi[0][3] >= 0.01 - 1e-9);
  CHECK(res.cost >= 0.03 - 1e-9);
  CHECK(res.grid_margin >= 0.01 - 1e-8);
  CHECK(res.relaxed.discrepancy <= 1e-10);
  CHECK(res.original.margin > 0.0);
  CHECK_FALSE(res.guarantee_regime);

  const auto seeding = make_statistics({{AgentType{3, 3, 3, cost_rules::seeding()(3, 3, 3)}, 1.0}});
  const auto sres = plan(seeding, config(0.1, 50, 0.01));
  REQUIRE(sres.feasible);
  CHECK(sres.cost >= res.cost - 1e-9);
}

TEST_CASE("original-constraint audit") {
  const auto one = make_statistics({{linear_type(2, 2, 1), 1.0}});
  const auto null = null_intervention(one);
  const auto m = audit_original(one, null, 0.1, 100);
  CHECK(m.margin == 0.0);
  CHECK(m.argmin == 0.0);
  const auto whole = audit_original(one, null, 1.0, 100);
  CHECK(whole.upper == 0.0);
  CHECK(whole.points == 1);
}

TEST_CASE("cost is monotone in delta") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p0 = small_instance(rng, 5);
    double prev = -1;
    for (double delta : {0.01, 0.02, 0.04, 0.08}) {
      const auto r = plan(p0, config(0.2, 40, delta));
      if (!r.feasible) break;
      CHECK(r.cost >= prev - 1e-9);
      prev = r.cost;
    }
  }
}

TEST_CASE("restricted LP never beats the full LP") {
  Rng rng(22);
  for (int trial = 0; trial < 15; ++trial) {
    const auto p0 = small_instance(rng, 6);
    auto full = config(0.1, 40, 0.03);
    auto restricted = full;
    restricted.full_reduction_only = true;
    const auto a = plan(p0, full);
    const auto b = plan(p0, restricted);
    if (b.feasible) {
      REQUIRE(a.feasible);
      CHECK(a.cost <= b.cost + 1e-9);
    }
  }
}

TEST_CASE("infeasible plans report binding points") {
  // A single type with no in-links besides itself cannot be lifted enough
  // when the margin exceeds what any intervention can add.
  const auto one = make_statistics({{linear_type(2, 2, 2), 1.0}});
  const auto res = plan(one, config(0.1, 10, 0.5));
  CHECK_FALSE(res.feasible);
  CHECK(res.lp.status == LpStatus::infeasible);
  CHECK_FALSE(res.binding_points.empty());
  CHECK(res.cost == 0.0);
}

TEST_CASE("zero in-degree needs the explicit flag") {
  const auto sinks = make_statistics({{linear_type(0, 2, 1), 0.5}, {linear_type(4, 2, 1), 0.5}});
  CHECK_THROWS_AS(plan(sinks, config(0.1, 10, 0.05)), InvalidArgument);
  auto cfg = config(0.1, 10, 0.05);
  cfg.exclude_right_endpoint = true;
  const auto lp = build_lp(sinks, cfg);
  CHECK(lp.grid.size() == 10);
  CHECK(lp.grid.back() < 1.0);
}

TEST_CASE("intervention reconstruction clamps and rescales") {
  const auto one = make_statistics({{linear_type(2, 2, 2), 1.0}});
  const auto lp = build_lp(one, config(0.1, 2, 0.05));
  const double x[] = {0.8, 0.4};
  const auto xi = intervention_from_lp(one, lp, x);
  CHECK(xi.xi[0][0] == 0.0);
  CHECK(xi.xi[0][1] + xi.xi[0][2] == doctest::Approx(1.0));
  const double neg[] = {-1e-12, 0.25};
  CHECK(intervention_from_lp(one, lp, neg).xi[0][1] == 0.0);
}
