#include <doctest.h>

#include <cmath>
#include <vector>

#include "ltmopt/error.hpp"
#include "ltmopt/rng.hpp"
#include "ltmopt/typestats.hpp"

using namespace ltmopt;

namespace {

AgentType linear_type(int d, int k, int r) { return {d, k, r, cost_rules::linear()(d, k, r)}; }

StatIntervention single_row(const Statistics& p, std::vector<double> row) {
  StatIntervention xi = null_intervention(p);
  xi.xi[0] = std::move(row);
  return xi;
}

}  // namespace

TEST_CASE("type validation") {
  CHECK_NOTHROW(validate_type(linear_type(2, 2, 2)));
  CHECK_THROWS_AS(validate_type({1, 1, 2, {0, 1, 2}}), InvalidArgument);
  CHECK_THROWS_AS(validate_type({1, 2, 1, {1, 1}}), InvalidArgument);   // c(0) != 0
  CHECK_THROWS_AS(validate_type({1, 2, 2, {0, 2, 1}}), InvalidArgument); // decreasing
  CHECK_THROWS_AS(validate_type({1, 2, 2, {0, 1}}), InvalidArgument);    // short table
  CHECK(reduced_type(linear_type(2, 3, 3), 2) == linear_type(2, 3, 1));
}

TEST_CASE("cost presets") {
  CHECK(cost_rules::linear()(3, 4, 3) == std::vector<double>{0, 1, 2, 3});
  CHECK(cost_rules::seeding()(3, 4, 3) == std::vector<double>{0, 3, 3, 3});
  CHECK(cost_rules::unit_seeding()(3, 4, 3) == std::vector<double>{0, 1, 1, 1});
  CHECK(cost_rules::linear()(3, 4, 0) == std::vector<double>{0});
}

TEST_CASE("extraction from concrete graphs") {
  const std::vector<Edge> path = {{0, 1}, {1, 0}, {1, 2}, {2, 1}};
  const MultiGraph g(3, path);
  const auto ex = extract_statistics(g, ThresholdVector{{1, 2, 1}}, cost_rules::linear());
  REQUIRE(ex.stats.size() == 2);
  const auto a = ex.stats.find(linear_type(1, 1, 1));
  const auto b = ex.stats.find(linear_type(2, 2, 2));
  REQUIRE(a);
  REQUIRE(b);
  CHECK(ex.stats.mass[*a] == doctest::Approx(2.0 / 3));
  CHECK(ex.stats.mass[*b] == doctest::Approx(1.0 / 3));
  CHECK(ex.stats.population == 3);
  CHECK(ex.type_of_node[1] == static_cast<std::int32_t>(*b));

  // 4-cycle in both directions: homogeneous
  const std::vector<Edge> ring = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {1, 0}, {2, 1}, {3, 2}, {0, 3}};
  const auto hom = extract_statistics(MultiGraph(4, ring), ThresholdVector{{1, 1, 1, 1}}, cost_rules::linear());
  REQUIRE(hom.stats.size() == 1);
  CHECK(hom.stats.mass[0] == 1.0);
}

TEST_CASE("null intervention and post statistics") {
  const auto p = make_statistics({{linear_type(2, 2, 2), 0.5}, {linear_type(1, 1, 1), 0.5}});
  const auto null = null_intervention(p);
  CHECK(null.xi[0][0] == 0.5);
  CHECK(null.xi[1][0] == 0.5);
  CHECK(intervention_cost(null) == 0.0);
  const auto post = post_statistics(p, null);
  CHECK(post.types == p.types);
  CHECK(post.mass == p.mass);

  const auto one = make_statistics({{linear_type(2, 2, 2), 1.0}});
  const auto full = post_statistics(one, single_row(one, {0.7, 0.0, 0.3}), true);
  CHECK(full.mass[*full.find(linear_type(2, 2, 0))] == doctest::Approx(0.3));
  CHECK(full.mass[*full.find(linear_type(2, 2, 2))] == doctest::Approx(0.7));

  const auto mixed = post_statistics(one, single_row(one, {0.5, 0.3, 0.2}));
  CHECK(mixed.mass[*mixed.find(linear_type(2, 2, 2))] == doctest::Approx(0.5));
  CHECK(mixed.mass[*mixed.find(linear_type(2, 2, 1))] == doctest::Approx(0.3));
  CHECK(mixed.mass[*mixed.find(linear_type(2, 2, 0))] == doctest::Approx(0.2));
}

TEST_CASE("intervention cost") {
  const auto one = make_statistics({{linear_type(2, 2, 2), 1.0}});
  CHECK(intervention_cost(single_row(one, {0.5, 0.3, 0.2})) == doctest::Approx(0.7));
  const auto seeding = make_statistics({{AgentType{2, 2, 2, cost_rules::seeding()(2, 2, 2)}, 1.0}});
  CHECK(intervention_cost(single_row(seeding, {0.5, 0.3, 0.2})) == doctest::Approx(1.0));
}

TEST_CASE("inconsistent interventions are rejected") {
  const auto one = make_statistics({{linear_type(2, 2, 2), 1.0}});
  CHECK_THROWS_AS(post_statistics(one, single_row(one, {0.5, 0.3, 0.3})), InfeasibleIntervention);
  CHECK_THROWS_AS(post_statistics(one, single_row(one, {1.1, -0.1, 0.0})), InfeasibleIntervention);
  CHECK_THROWS_AS(post_statistics(one, single_row(one, {0.5, 0.5})), InfeasibleIntervention);
}

TEST_CASE("well-posedness") {
  const auto three = make_statistics({{linear_type(3, 3, 1), 1.0}});
  CHECK(check_well_posed(2, three).ok());
  const auto wp1 = check_well_posed(1, three);
  CHECK_FALSE(wp1.no_self_loop);
  CHECK(wp1.integral);
  CHECK(wp1.balanced);
  const auto unbalanced = make_statistics({{linear_type(2, 3, 1), 1.0}});
  CHECK_FALSE(check_well_posed(10, unbalanced).balanced);
  const auto thirds = make_statistics({{linear_type(1, 1, 1), 1.0 / 3}, {linear_type(2, 2, 1), 2.0 / 3}});
  CHECK_FALSE(check_well_posed(4, thirds).integral);
  CHECK(check_well_posed(3, thirds).integral);
}

TEST_CASE("moments") {
  const auto three = make_statistics({{linear_type(3, 3, 1), 1.0}});
  CHECK(moment(three, Moment::d) == 3.0);
  CHECK(moment(three, Moment::dk) == 9.0);
  CHECK(branching_nu(three) == 2.0);
  const auto two = make_statistics({{linear_type(1, 1, 1), 0.5}, {linear_type(3, 3, 1), 0.5}});
  CHECK(moment(two, Moment::d) == 2.0);
  CHECK(moment(two, Moment::d2) == 5.0);
}

TEST_CASE("post statistics preserve mass and first moments") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<AgentType, double>> entries;
    const int types = 1 + static_cast<int>(rng.below(6));
    double total = 0.0;
    for (int t = 0; t < types; ++t) {
      const int k = 1 + static_cast<int>(rng.below(8));
      const int d = static_cast<int>(rng.below(8));
      const int r = static_cast<int>(rng.below(k + 1));
      const double m = rng.uniform() + 0.01;
      entries.emplace_back(linear_type(d, k, r), m);
      total += m;
    }
    for (auto& e : entries) e.second /= total;
    const auto p0 = make_statistics(entries);
    auto xi = null_intervention(p0);
    for (std::size_t w = 0; w < p0.size(); ++w) {
      double left = p0.mass[w];
      for (std::size_t eta = 1; eta < xi.xi[w].size(); ++eta) {
        const double move = left * rng.uniform() * 0.5;
        xi.xi[w][eta] = move;
        left -= move;
      }
      xi.xi[w][0] = left;
    }
    const auto post = post_statistics(p0, xi);
    double mass = 0.0;
    for (double m : post.mass) mass += m;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(moment(post, Moment::d) == doctest::Approx(moment(p0, Moment::d)).epsilon(1e-12));
    CHECK(moment(post, Moment::k) == doctest::Approx(moment(p0, Moment::k)).epsilon(1e-12));
    CHECK(intervention_cost(xi) >= 0.0);
  }
}
