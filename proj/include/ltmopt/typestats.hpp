#pragma once

// Agent types, empirical statistics and statistical interventions.

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ltmopt/graph.hpp"

namespace ltmopt {

// A type (d, k, r, c): in-degree, out-degree, threshold and the cost table
// c(0..r). Two types are equal iff all four agree, cost tables by content.
struct AgentType {
  std::int32_t d = 0;
  std::int32_t k = 0;
  std::int32_t r = 0;
  std::vector<double> cost;  // size r + 1, cost[0] == 0, non-decreasing

  friend auto operator<=>(const AgentType&, const AgentType&) = default;
  friend bool operator==(const AgentType&, const AgentType&) = default;
};

// Throws InvalidArgument unless 0 <= r <= k, d >= 0, and the cost table has
// r + 1 finite non-negative non-decreasing entries starting at 0.
void validate_type(const AgentType& w);

// The type an agent of type w becomes after its threshold is lowered by eta.
AgentType reduced_type(const AgentType& w, std::int32_t eta);

// Empirical distribution of types. Types are kept sorted and unique. When the
// statistics come from a concrete population, `population` holds n and
// `counts` the exact number of agents per type (mass = count / n).
struct Statistics {
  std::vector<AgentType> types;
  std::vector<double> mass;
  std::int64_t population = 0;
  std::vector<std::int64_t> counts;

  std::size_t size() const { return types.size(); }
  // Index of w, if present.
  std::optional<std::size_t> find(const AgentType& w) const;
  // Throws InvalidArgument unless masses are non-negative and sum to 1 within 1e-12,
  // types are valid, sorted and unique.
  void validate() const;
};

// Builds sorted statistics from (type, mass) pairs, merging duplicates.
// Masses with zero weight are kept only if keep_zero is set.
Statistics make_statistics(std::vector<std::pair<AgentType, double>> entries, bool keep_zero = true);
// Exact statistics from integer counts over a population of sum(counts).
Statistics make_statistics_from_counts(std::vector<std::pair<AgentType, std::int64_t>> entries);

// xi[w][eta] = fraction of agents of type p0.types[w] lowered by eta, eta = 0..r_w.
struct StatIntervention {
  std::vector<AgentType> types;
  std::vector<std::vector<double>> xi;

  // Throws InfeasibleIntervention unless types match p0, entries are
  // non-negative, rows have r_w + 1 entries and sum to p0 masses within 1e-12.
  void validate_against(const Statistics& p0) const;
};

// Maps (d, k, r) to a cost table c(0..r).
using CostRule = std::function<std::vector<double>(std::int32_t d, std::int32_t k, std::int32_t r)>;

namespace cost_rules {
CostRule linear();       // c(eta) = eta
CostRule seeding();      // c(eta) = r for eta > 0
CostRule unit_seeding(); // c(eta) = 1 for eta > 0
}  // namespace cost_rules

struct ExtractedStatistics {
  Statistics stats;
  std::vector<std::int32_t> type_of_node;  // index into stats.types
};

ExtractedStatistics extract_statistics(const MultiGraph& g, const ThresholdVector& rho,
                                       const CostRule& cost_rule);

StatIntervention null_intervention(const Statistics& p0);

// Statistics after the intervention. Types absent from p0 that receive mass
// are created; types whose mass becomes zero are kept unless drop_zero is set.
Statistics post_statistics(const Statistics& p0, const StatIntervention& xi, bool drop_zero = false);

double intervention_cost(const StatIntervention& xi);

struct WellPosedness {
  bool integral = false;       // n p_w is a non-negative integer for all w
  bool balanced = false;       // <p, d> == <p, k>
  bool no_self_loop = false;   // d_w + k_w <= n <p, d> for all w with p_w > 0
  bool ok() const { return integral && balanced && no_self_loop; }
};

WellPosedness check_well_posed(std::int64_t n, const Statistics& p);

enum class Moment { d, k, d2, k2, dk };

double moment(const Statistics& p, Moment which);
// <p, dk> / <p, d> - 1; zero when <p, d> == 0.
double branching_nu(const Statistics& p);

struct DegreeSummary {
  std::int32_t d_min = 0;
  std::int32_t d_max = 0;
  std::int32_t k_max = 0;
};

// Extremes over types with positive mass.
DegreeSummary degree_summary(const Statistics& p);

}  // namespace ltmopt
