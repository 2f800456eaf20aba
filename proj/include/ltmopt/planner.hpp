#pragma once

// The discretized mean-field planning problem: least-cost statistical
// intervention keeping phi above the diagonal on a grid, plus audits of the
// resulting intervention against the continuous constraints.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ltmopt/lp.hpp"
#include "ltmopt/typestats.hpp"

namespace ltmopt {

struct PlannerConfig {
  double eps = 0.1;
  std::size_t grid_n = 100;
  std::optional<double> delta = 0.05;  // nullopt: delta_N (guarantee regime)
  std::size_t fine_m = 0;              // audit grid; 0 means 10 * grid_n
  // Accept d_min = 0 (alpha = 0) by dropping the right end point z = 1 - alpha
  // from the grid and the relaxed audit.
  bool exclude_right_endpoint = false;
  // Only eta in {0, r_w}: the seeding restriction of the same LP.
  bool full_reduction_only = false;
  unsigned jobs = 1;
  LpOptions lp;

  std::size_t audit_points() const { return fine_m ? fine_m : 10 * grid_n; }
  // Throws InvalidArgument on eps outside (0, 1], grid_n == 0 or delta <= 0.
  void validate() const;
};

// eps d_min / <p0, d>, d_min over types with positive mass. Throws
// InvalidArgument when d_min == 0 unless allow_zero is set (then returns 0).
double alpha_eps(const Statistics& p0, double eps, bool allow_zero = false);

// (1 - alpha) / (2N) * derivative_bound(p0).
double delta_N(const Statistics& p0, double eps, std::size_t n, bool allow_zero = false);

struct PlanColumn {
  std::size_t type;  // index into p0.types
  std::int32_t eta;
};

struct PlannerLp {
  LpModel model;
  std::vector<PlanColumn> columns;  // one per model variable
  std::vector<double> grid;         // z_i, one grid row each (rows 0..grid.size()-1)
  std::vector<double> grid_rhs;     // z_i + delta - phi_p0(z_i)
  std::vector<std::size_t> budget_type;  // rows grid.size().. : p0 type index
  double alpha = 0.0;
  double delta = 0.0;
  std::size_t pruned = 0;
};

PlannerLp build_lp(const Statistics& p0, const PlannerConfig& cfg);

// Reconstructs xi from LP values: negatives clamped to 0, per-type totals
// above p0 rescaled onto the budget, xi_w(0) from the remainder.
StatIntervention intervention_from_lp(const Statistics& p0, const PlannerLp& lp,
                                      std::span<const double> x);

struct MarginReport {
  double margin = 0.0;    // min over the audit grid of phi(z) - z
  double argmin = 0.0;    // where it is attained
  double upper = 0.0;     // right end of the audited interval
  std::size_t points = 0;
};

// phi_{p(xi)}(z) - z on m + 1 points of [0, 1 - alpha] through the
// decomposition over p0, and `direct` the same through phi on the post statistics.
struct RelaxedAudit {
  MarginReport decomposed;
  MarginReport direct;
  double discrepancy = 0.0;  // max |decomposed - direct| pointwise
};

RelaxedAudit audit_relaxed(const Statistics& p0, const StatIntervention& xi, double alpha,
                           std::size_t m, bool exclude_right_endpoint = false);

// min of phi_{p(xi)}(z) - z over m + 1 points of [0, psi_{p(xi)}^{-1}(1 - eps)].
MarginReport audit_original(const Statistics& p0, const StatIntervention& xi, double eps,
                            std::size_t m);

struct MomentSummary {
  double d = 0.0;
  double k = 0.0;
  double d2 = 0.0;
  double k2 = 0.0;
  double dk = 0.0;
  double nu = 0.0;
};

MomentSummary moment_summary(const Statistics& p);

struct PlanResult {
  PlannerConfig config;
  double alpha = 0.0;
  double delta_used = 0.0;
  double delta_n = 0.0;
  bool guarantee_regime = false;  // delta_used >= delta_n
  std::size_t variables = 0;
  std::size_t grid_rows = 0;
  std::size_t budget_rows = 0;
  std::size_t pruned = 0;
  LpSolution lp;
  bool feasible = false;  // LP solved to certified optimality

  StatIntervention xi;
  double cost = 0.0;
  double grid_margin = 0.0;   // min_i phi_{p(xi)}(z_i) - z_i, should be >= delta
  double lp_violation = 0.0;  // check_solution on the LP
  RelaxedAudit relaxed;
  MarginReport original;
  MomentSummary moments_before;
  MomentSummary moments_after;

  // Infeasible LPs: grid points that no intervention within the budgets can
  // satisfy on their own, else the rows left violated by phase 1.
  std::vector<double> binding_points;
  std::string message;
};

PlanResult plan(const Statistics& p0, const PlannerConfig& cfg);

}  // namespace ltmopt
