#pragma once

// Finite linear programs and a certified revised simplex solver.

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace ltmopt {

enum class Sense { greater_equal, less_equal, equal };

struct LpTerm {
  std::size_t var;
  double coef;
};

// minimize c'x subject to rows a_i'x (>=, <=, =) b_i and lo <= x <= hi.
class LpModel {
 public:
  static constexpr double inf = std::numeric_limits<double>::infinity();

  std::size_t add_variable(double cost, double lo = 0.0, double hi = inf, std::string name = {});
  // Terms referring to the same variable are summed. Throws InvalidArgument on
  // unknown variables or non-finite data.
  std::size_t add_row(std::span<const LpTerm> terms, Sense sense, double rhs, std::string name = {});

  std::size_t variable_count() const { return cost_.size(); }
  std::size_t row_count() const { return rows_.size(); }

  double cost(std::size_t j) const { return cost_[j]; }
  double lower(std::size_t j) const { return lower_[j]; }
  double upper(std::size_t j) const { return upper_[j]; }
  const std::string& variable_name(std::size_t j) const { return var_names_[j]; }
  void set_cost(std::size_t j, double c);

  struct Row {
    std::vector<LpTerm> terms;
    Sense sense;
    double rhs;
    std::string name;
  };
  const Row& row(std::size_t i) const { return rows_[i]; }

 private:
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<std::string> var_names_;
  std::vector<Row> rows_;
};

enum class LpStatus { optimal, infeasible, unbounded, numerical_failure, iteration_limit };

const char* to_string(LpStatus s);

struct LpOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;  // reduced-cost tolerance
  double gap_tol = 1e-8;          // relative primal/dual objective gap
  double pivot_tol = 1e-10;
  std::size_t max_iterations = 0;  // 0 = automatic
  std::size_t refactor_interval = 100;
  std::size_t degenerate_switch = 50;  // consecutive degenerate pivots before Bland's rule
  enum class Formulation { automatic, primal, dual } formulation = Formulation::automatic;
};

struct LpSolution {
  LpStatus status = LpStatus::numerical_failure;
  std::vector<double> x;
  double objective = 0.0;
  // Row multipliers: >= 0 on >= rows, <= 0 on <= rows (minimization).
  std::vector<double> duals;
  double dual_objective = 0.0;
  double max_violation = 0.0;       // recomputed by check_solution
  double dual_infeasibility = 0.0;  // largest negative reduced cost at termination
  double gap = 0.0;                 // |objective - dual_objective| / max(1, |objective|)
  std::size_t iterations = 0;
  bool solved_via_dual = false;
  std::vector<std::size_t> infeasible_rows;  // rows left with positive phase-1 residual
  std::string message;
};

// Deterministic for identical input. Status optimal implies the returned x is
// within bounds, violates no row by more than feasibility_tol (scaled by
// max(1, |rhs|)), and the primal/dual gap is within gap_tol.
LpSolution solve(const LpModel& model, const LpOptions& options = {});

struct SolutionCheck {
  double max_violation = 0.0;  // rows and bounds, absolute
  double objective = 0.0;
};

// Independent residual evaluation. Throws DimensionMismatch if x has the wrong size.
SolutionCheck check_solution(const LpModel& model, std::span<const double> x);

// CPLEX LP text format, variables and rows in index order.
void write_lp_format(const LpModel& model, std::ostream& os);

}  // namespace ltmopt
