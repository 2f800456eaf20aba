#include "ltmopt/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "ltmopt/error.hpp"
#include "ltmopt/kernels.hpp"

namespace ltmopt {

std::size_t LpModel::add_variable(double cost, double lo, double hi, std::string name) {
  if (!std::isfinite(cost)) throw InvalidArgument("LP variable cost must be finite");
  if (std::isnan(lo) || std::isnan(hi) || lo > hi || lo == inf || hi == -inf) {
    throw InvalidArgument("LP variable bounds must satisfy lo <= hi");
  }
  cost_.push_back(cost);
  lower_.push_back(lo);
  upper_.push_back(hi);
  var_names_.push_back(std::move(name));
  return cost_.size() - 1;
}

void LpModel::set_cost(std::size_t j, double c) {
  if (!std::isfinite(c)) throw InvalidArgument("LP variable cost must be finite");
  cost_.at(j) = c;
}

std::size_t LpModel::add_row(std::span<const LpTerm> terms, Sense sense, double rhs,
                             std::string name) {
  if (!std::isfinite(rhs)) throw InvalidArgument("LP row right-hand side must be finite");
  std::vector<LpTerm> sorted(terms.begin(), terms.end());
  for (const auto& t : sorted) {
    if (t.var >= cost_.size()) throw InvalidArgument("LP row refers to an unknown variable");
    if (!std::isfinite(t.coef)) throw InvalidArgument("LP row coefficient must be finite");
  }
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const LpTerm& a, const LpTerm& b) { return a.var < b.var; });
  std::vector<LpTerm> merged;
  for (const auto& t : sorted) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const LpTerm& t) { return t.coef == 0.0; });
  rows_.push_back({std::move(merged), sense, rhs, std::move(name)});
  return rows_.size() - 1;
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::numerical_failure: return "numerical_failure";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

SolutionCheck check_solution(const LpModel& model, std::span<const double> x) {
  if (x.size() != model.variable_count()) {
    throw DimensionMismatch("solution has " + std::to_string(x.size()) + " entries, model has " +
                            std::to_string(model.variable_count()) + " variables");
  }
  SolutionCheck out;
  for (std::size_t j = 0; j < x.size(); ++j) {
    out.objective += model.cost(j) * x[j];
    out.max_violation = std::max(out.max_violation, model.lower(j) - x[j]);
    out.max_violation = std::max(out.max_violation, x[j] - model.upper(j));
  }
  for (std::size_t i = 0; i < model.row_count(); ++i) {
    const auto& row = model.row(i);
    double lhs = 0.0;
    for (const auto& t : row.terms) lhs += t.coef * x[t.var];
    double v = 0.0;
    switch (row.sense) {
      case Sense::greater_equal: v = row.rhs - lhs; break;
      case Sense::less_equal: v = lhs - row.rhs; break;
      case Sense::equal: v = std::abs(lhs - row.rhs); break;
    }
    out.max_violation = std::max(out.max_violation, v);
  }
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// Model -> inequality form over non-negative columns v.

struct VariableMap {
  enum class Kind { shift, flip, split } kind;
  double offset;  // x = offset + v, x = offset - v, or x = v+ - v-
  std::size_t column;
};

struct InequalityForm {
  std::size_t columns = 0;
  std::vector<double> cost;
  double cost_offset = 0.0;
  struct Row {
    std::vector<LpTerm> terms;  // over columns
    Sense sense;
    double rhs;
    std::ptrdiff_t model_row;  // -1 for upper-bound rows
  };
  std::vector<Row> rows;
  std::vector<VariableMap> vars;
};

InequalityForm to_inequality_form(const LpModel& model) {
  InequalityForm f;
  std::vector<std::pair<std::size_t, double>> bound_rows;  // (column, bound)
  for (std::size_t j = 0; j < model.variable_count(); ++j) {
    const double lo = model.lower(j);
    const double hi = model.upper(j);
    const double c = model.cost(j);
    if (std::isfinite(lo)) {
      f.vars.push_back({VariableMap::Kind::shift, lo, f.columns});
      f.cost.push_back(c);
      f.cost_offset += c * lo;
      if (std::isfinite(hi)) bound_rows.emplace_back(f.columns, hi - lo);
      ++f.columns;
    } else if (std::isfinite(hi)) {
      f.vars.push_back({VariableMap::Kind::flip, hi, f.columns});
      f.cost.push_back(-c);
      f.cost_offset += c * hi;
      ++f.columns;
    } else {
      f.vars.push_back({VariableMap::Kind::split, 0.0, f.columns});
      f.cost.push_back(c);
      f.cost.push_back(-c);
      f.columns += 2;
    }
  }
  for (std::size_t i = 0; i < model.row_count(); ++i) {
    const auto& row = model.row(i);
    InequalityForm::Row out{{}, row.sense, row.rhs, static_cast<std::ptrdiff_t>(i)};
    out.terms.reserve(row.terms.size());
    for (const auto& t : row.terms) {
      const auto& vm = f.vars[t.var];
      switch (vm.kind) {
        case VariableMap::Kind::shift:
          out.rhs -= t.coef * vm.offset;
          out.terms.push_back({vm.column, t.coef});
          break;
        case VariableMap::Kind::flip:
          out.rhs -= t.coef * vm.offset;
          out.terms.push_back({vm.column, -t.coef});
          break;
        case VariableMap::Kind::split:
          out.terms.push_back({vm.column, t.coef});
          out.terms.push_back({vm.column + 1, -t.coef});
          break;
      }
    }
    f.rows.push_back(std::move(out));
  }
  for (const auto& [col, bound] : bound_rows) {
    f.rows.push_back({{LpTerm{col, 1.0}}, Sense::less_equal, bound, -1});
  }
  return f;
}

std::vector<double> recover_x(const InequalityForm& f, std::span<const double> v) {
  std::vector<double> x(f.vars.size());
  for (std::size_t j = 0; j < f.vars.size(); ++j) {
    const auto& vm = f.vars[j];
    switch (vm.kind) {
      case VariableMap::Kind::shift: x[j] = vm.offset + v[vm.column]; break;
      case VariableMap::Kind::flip: x[j] = vm.offset - v[vm.column]; break;
      case VariableMap::Kind::split: x[j] = v[vm.column] - v[vm.column + 1]; break;
    }
  }
  return x;
}

// ---------------------------------------------------------------------------
// Standard form: min f'v s.t. M v = g, v >= 0, g >= 0, with a unit starting basis.

struct StandardForm {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t structural = 0;
  std::vector<std::size_t> col_start;
  std::vector<std::size_t> row_index;
  std::vector<double> value;
  std::vector<double> cost;
  std::vector<double> rhs;
  std::vector<char> artificial;
  std::vector<std::size_t> initial_basis;
  std::vector<double> row_sign;
};

StandardForm to_standard_form(const InequalityForm& f) {
  StandardForm s;
  s.m = f.rows.size();
  s.structural = f.columns;
  s.row_sign.assign(s.m, 1.0);
  s.rhs.assign(s.m, 0.0);
  std::vector<double> slack_coef(s.m, 0.0);
  for (std::size_t i = 0; i < s.m; ++i) {
    const auto& row = f.rows[i];
    double slack = 0.0;
    if (row.sense == Sense::less_equal) slack = 1.0;
    if (row.sense == Sense::greater_equal) slack = -1.0;
    double sign = 1.0;
    if (row.rhs < 0.0 || (row.rhs == 0.0 && slack < 0.0)) sign = -1.0;
    s.row_sign[i] = sign;
    s.rhs[i] = sign * row.rhs;
    slack_coef[i] = sign * slack;
  }
  // Structural columns in CSC.
  std::vector<std::size_t> count(f.columns + 1, 0);
  for (const auto& row : f.rows) {
    for (const auto& t : row.terms) ++count[t.var + 1];
  }
  s.col_start.assign(f.columns + 1, 0);
  for (std::size_t j = 0; j < f.columns; ++j) s.col_start[j + 1] = s.col_start[j] + count[j + 1];
  s.row_index.resize(s.col_start.back());
  s.value.resize(s.col_start.back());
  std::vector<std::size_t> fill(s.col_start.begin(), s.col_start.end() - 1);
  for (std::size_t i = 0; i < s.m; ++i) {
    for (const auto& t : f.rows[i].terms) {
      s.row_index[fill[t.var]] = i;
      s.value[fill[t.var]] = s.row_sign[i] * t.coef;
      ++fill[t.var];
    }
  }
  s.cost = f.cost;
  s.artificial.assign(f.columns, 0);
  s.initial_basis.assign(s.m, 0);
  auto push_unit = [&](std::size_t row, double coef, bool art) {
    s.row_index.push_back(row);
    s.value.push_back(coef);
    s.col_start.push_back(s.row_index.size());
    s.cost.push_back(0.0);
    s.artificial.push_back(art ? 1 : 0);
    return s.cost.size() - 1;
  };
  for (std::size_t i = 0; i < s.m; ++i) {
    if (slack_coef[i] != 0.0) {
      const auto col = push_unit(i, slack_coef[i], false);
      if (slack_coef[i] > 0.0) s.initial_basis[i] = col;
    }
  }
  for (std::size_t i = 0; i < s.m; ++i) {
    if (slack_coef[i] <= 0.0) s.initial_basis[i] = push_unit(i, 1.0, true);
  }
  s.n = s.cost.size();
  return s;
}

// ---------------------------------------------------------------------------
// Revised simplex with a dense, column-major basis inverse.

class Simplex {
 public:
  enum class Result { optimal, infeasible, unbounded, singular, iteration_limit };

  Simplex(const StandardForm& sf, const LpOptions& opt)
      : sf_(sf),
        opt_(opt),
        m_(sf.m),
        basis_(sf.initial_basis),
        where_(sf.n, npos),
        binv_(m_ * m_, 0.0),
        xb_(m_, 0.0),
        y_(m_, 0.0),
        alpha_(m_, 0.0) {
    for (std::size_t r = 0; r < m_; ++r) where_[basis_[r]] = r;
    max_iter_ = opt.max_iterations ? opt.max_iterations : 200 * (sf.m + sf.n) + 10000;
  }

  Result run() {
    if (!refactor()) return Result::singular;
    bool needs_phase1 = false;
    for (auto col : basis_) needs_phase1 = needs_phase1 || sf_.artificial[col];
    if (needs_phase1) {
      std::vector<double> phase1(sf_.n, 0.0);
      for (std::size_t j = 0; j < sf_.n; ++j) phase1[j] = sf_.artificial[j] ? 1.0 : 0.0;
      const auto r = iterate(phase1, true);
      if (r != Result::optimal) return r == Result::unbounded ? Result::singular : r;
      double residual = 0.0;
      double scale = 1.0;
      for (double g : sf_.rhs) scale = std::max(scale, std::abs(g));
      for (std::size_t row = 0; row < m_; ++row) {
        if (sf_.artificial[basis_[row]]) residual += std::max(0.0, xb_[row]);
      }
      if (residual > opt_.feasibility_tol * scale) {
        for (std::size_t row = 0; row < m_; ++row) {
          if (sf_.artificial[basis_[row]] && xb_[row] > opt_.feasibility_tol * scale) {
            infeasible_rows_.push_back(row);
          }
        }
        return Result::infeasible;
      }
      drive_out_artificials();
    }
    for (int attempt = 0; attempt < 4; ++attempt) {
      const auto r = iterate(sf_.cost, false);
      if (r != Result::optimal) return r;
      if (!refactor()) return Result::singular;
      compute_duals(sf_.cost);
      dual_infeasibility_ = worst_reduced_cost(sf_.cost);
      if (dual_infeasibility_ <= opt_.optimality_tol) return Result::optimal;
    }
    return Result::optimal;
  }

  std::vector<double> values() const {
    std::vector<double> v(sf_.n, 0.0);
    for (std::size_t r = 0; r < m_; ++r) v[basis_[r]] = std::max(0.0, xb_[r]);
    return v;
  }
  const std::vector<double>& duals() const { return y_; }
  std::size_t iterations() const { return iterations_; }
  double dual_infeasibility() const { return dual_infeasibility_; }
  const std::vector<std::size_t>& infeasible_rows() const { return infeasible_rows_; }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  double* col(std::size_t c) { return binv_.data() + c * m_; }
  const double* col(std::size_t c) const { return binv_.data() + c * m_; }

  // Rebuilds B^{-1} by Gauss-Jordan with partial pivoting and recomputes x_B.
  bool refactor() {
    since_refactor_ = 0;
    if (m_ == 0) return true;
    // Row-major augmented work array [B | I].
    const std::size_t w = 2 * m_;
    std::vector<double> a(m_ * w, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      const auto j = basis_[r];
      for (std::size_t k = sf_.col_start[j]; k < sf_.col_start[j + 1]; ++k) {
        a[sf_.row_index[k] * w + r] = sf_.value[k];
      }
      a[r * w + m_ + r] = 1.0;
    }
    for (std::size_t c = 0; c < m_; ++c) {
      std::size_t piv = c;
      double best = std::abs(a[c * w + c]);
      for (std::size_t r = c + 1; r < m_; ++r) {
        if (std::abs(a[r * w + c]) > best) {
          best = std::abs(a[r * w + c]);
          piv = r;
        }
      }
      if (best < 1e-13) return false;
      if (piv != c) {
        std::swap_ranges(a.begin() + static_cast<std::ptrdiff_t>(piv * w),
                         a.begin() + static_cast<std::ptrdiff_t>(piv * w + w),
                         a.begin() + static_cast<std::ptrdiff_t>(c * w));
      }
      const double inv = 1.0 / a[c * w + c];
      for (std::size_t k = 0; k < w; ++k) a[c * w + k] *= inv;
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == c) continue;
        const double f = a[r * w + c];
        if (f != 0.0) {
          kernels::axpy(-f, std::span<const double>(a.data() + c * w, w),
                        std::span<double>(a.data() + r * w, w));
        }
      }
    }
    // B^{-1}(r, c) = a[r][m + c]; store column-major.
    for (std::size_t r = 0; r < m_; ++r) {
      for (std::size_t c = 0; c < m_; ++c) binv_[c * m_ + r] = a[r * w + m_ + c];
    }
    std::fill(xb_.begin(), xb_.end(), 0.0);
    for (std::size_t c = 0; c < m_; ++c) {
      if (sf_.rhs[c] != 0.0) kernels::axpy(sf_.rhs[c], std::span<const double>(col(c), m_), xb_);
    }
    for (auto& v : xb_) {
      if (v < 0.0 && v > -opt_.feasibility_tol) v = 0.0;
    }
    return true;
  }

  // y' = f_B' B^{-1}
  void compute_duals(const std::vector<double>& f) {
    std::vector<double> fb(m_);
    for (std::size_t r = 0; r < m_; ++r) fb[r] = f[basis_[r]];
    for (std::size_t c = 0; c < m_; ++c) y_[c] = kernels::dot(fb, std::span<const double>(col(c), m_));
  }

  double reduced_cost(const std::vector<double>& f, std::size_t j) const {
    double d = f[j];
    for (std::size_t k = sf_.col_start[j]; k < sf_.col_start[j + 1]; ++k) {
      d -= y_[sf_.row_index[k]] * sf_.value[k];
    }
    return d;
  }

  double worst_reduced_cost(const std::vector<double>& f) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < sf_.n; ++j) {
      if (where_[j] != npos || sf_.artificial[j]) continue;
      worst = std::max(worst, -reduced_cost(f, j));
    }
    return worst;
  }

  // alpha = B^{-1} M_j
  void ftran(std::size_t j) {
    std::fill(alpha_.begin(), alpha_.end(), 0.0);
    for (std::size_t k = sf_.col_start[j]; k < sf_.col_start[j + 1]; ++k) {
      kernels::axpy(sf_.value[k], std::span<const double>(col(sf_.row_index[k]), m_), alpha_);
    }
  }

  void pivot(std::size_t p, std::size_t q, double theta) {
    for (std::size_t r = 0; r < m_; ++r) xb_[r] -= theta * alpha_[r];
    xb_[p] = theta;
    const double ap = alpha_[p];
    for (std::size_t c = 0; c < m_; ++c) {
      double* bc = col(c);
      const double t = bc[p] / ap;
      if (t != 0.0) {
        kernels::axpy(-t, alpha_, std::span<double>(bc, m_));
        bc[p] = t;
      }
    }
    where_[basis_[p]] = npos;
    basis_[p] = q;
    where_[q] = p;
    ++iterations_;
    ++since_refactor_;
  }

  Result iterate(const std::vector<double>& f, bool allow_artificial) {
    bool bland = false;
    std::size_t degenerate_run = 0;
    for (;;) {
      if (iterations_ >= max_iter_) return Result::iteration_limit;
      if (since_refactor_ >= opt_.refactor_interval && !refactor()) return Result::singular;
      compute_duals(f);

      // Pricing: Dantzig, or lowest index under Bland's rule.
      std::size_t q = npos;
      double best = -opt_.optimality_tol;
      for (std::size_t j = 0; j < sf_.n; ++j) {
        if (where_[j] != npos) continue;
        if (sf_.artificial[j] && !allow_artificial) continue;
        const double d = reduced_cost(f, j);
        if (d < best) {
          q = j;
          if (bland) break;
          best = d;
        }
      }
      if (q == npos) {
        if (since_refactor_ > 0) {
          if (!refactor()) return Result::singular;
          continue;
        }
        return Result::optimal;
      }

      ftran(q);
      std::size_t p = npos;
      if (!bland) {
        // Harris two-pass ratio test.
        double theta_max = LpModel::inf;
        for (std::size_t r = 0; r < m_; ++r) {
          if (alpha_[r] > opt_.pivot_tol) {
            theta_max = std::min(theta_max,
                                 (std::max(xb_[r], 0.0) + opt_.feasibility_tol) / alpha_[r]);
          }
        }
        if (theta_max == LpModel::inf) return Result::unbounded;
        double best_alpha = 0.0;
        for (std::size_t r = 0; r < m_; ++r) {
          if (alpha_[r] > opt_.pivot_tol && std::max(xb_[r], 0.0) / alpha_[r] <= theta_max &&
              alpha_[r] > best_alpha) {
            best_alpha = alpha_[r];
            p = r;
          }
        }
      } else {
        double theta = LpModel::inf;
        for (std::size_t r = 0; r < m_; ++r) {
          if (alpha_[r] > opt_.pivot_tol) theta = std::min(theta, std::max(xb_[r], 0.0) / alpha_[r]);
        }
        if (theta == LpModel::inf) return Result::unbounded;
        for (std::size_t r = 0; r < m_; ++r) {
          if (alpha_[r] > opt_.pivot_tol &&
              std::max(xb_[r], 0.0) / alpha_[r] <= theta + 1e-12 &&
              (p == npos || basis_[r] < basis_[p])) {
            p = r;
          }
        }
      }
      const double theta = std::max(xb_[p], 0.0) / alpha_[p];
      pivot(p, q, theta);

      if (theta <= 1e-12) {
        if (++degenerate_run >= opt_.degenerate_switch) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
    }
  }

  // Pivots zero-level artificials out of the basis where a structural or
  // slack column can replace them; rows where none can are redundant.
  void drive_out_artificials() {
    std::vector<double> row(m_);
    for (std::size_t p = 0; p < m_; ++p) {
      if (!sf_.artificial[basis_[p]]) continue;
      for (std::size_t c = 0; c < m_; ++c) row[c] = col(c)[p];
      std::size_t q = npos;
      double best = 1e-9;
      for (std::size_t j = 0; j < sf_.n; ++j) {
        if (where_[j] != npos || sf_.artificial[j]) continue;
        double v = 0.0;
        for (std::size_t k = sf_.col_start[j]; k < sf_.col_start[j + 1]; ++k) {
          v += row[sf_.row_index[k]] * sf_.value[k];
        }
        if (std::abs(v) > best) {
          best = std::abs(v);
          q = j;
        }
      }
      if (q == npos) continue;
      ftran(q);
      pivot(p, q, xb_[p] / alpha_[p]);
    }
    refactor();
  }

  const StandardForm& sf_;
  const LpOptions& opt_;
  std::size_t m_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> where_;
  std::vector<double> binv_;
  std::vector<double> xb_;
  std::vector<double> y_;
  std::vector<double> alpha_;
  std::size_t iterations_ = 0;
  std::size_t since_refactor_ = 0;
  std::size_t max_iter_ = 0;
  double dual_infeasibility_ = 0.0;
  std::vector<std::size_t> infeasible_rows_;
};

LpStatus map_result(Simplex::Result r) {
  switch (r) {
    case Simplex::Result::optimal: return LpStatus::optimal;
    case Simplex::Result::infeasible: return LpStatus::infeasible;
    case Simplex::Result::unbounded: return LpStatus::unbounded;
    case Simplex::Result::singular: return LpStatus::numerical_failure;
    case Simplex::Result::iteration_limit: return LpStatus::iteration_limit;
  }
  return LpStatus::numerical_failure;
}

double row_scale(const LpModel& model) {
  double s = 1.0;
  for (std::size_t i = 0; i < model.row_count(); ++i) s = std::max(s, std::abs(model.row(i).rhs));
  for (std::size_t j = 0; j < model.variable_count(); ++j) {
    if (std::isfinite(model.lower(j))) s = std::max(s, std::abs(model.lower(j)));
    if (std::isfinite(model.upper(j))) s = std::max(s, std::abs(model.upper(j)));
  }
  return s;
}

// Fills objective, violation and gap, and downgrades an optimal status that
// does not survive the independent residual check.
void certify(const LpModel& model, const LpOptions& opt, LpSolution& sol) {
  const auto check = check_solution(model, sol.x);
  sol.objective = check.objective;
  sol.max_violation = check.max_violation;
  sol.gap = std::abs(sol.objective - sol.dual_objective) / std::max(1.0, std::abs(sol.objective));
  if (sol.status != LpStatus::optimal) return;
  const double tol = opt.feasibility_tol * row_scale(model);
  if (sol.max_violation > tol) {
    sol.status = LpStatus::numerical_failure;
    sol.message = "solution violates constraints by " + std::to_string(sol.max_violation);
  } else if (sol.gap > opt.gap_tol) {
    sol.status = LpStatus::numerical_failure;
    sol.message = "primal/dual objective gap " + std::to_string(sol.gap) + " exceeds tolerance";
  } else if (sol.dual_infeasibility > 100.0 * opt.optimality_tol) {
    sol.status = LpStatus::numerical_failure;
    sol.message = "reduced costs violate optimality by " + std::to_string(sol.dual_infeasibility);
  }
}

double dual_objective_of(const InequalityForm& f, std::span<const double> y) {
  double s = f.cost_offset;
  for (std::size_t i = 0; i < f.rows.size(); ++i) s += f.rows[i].rhs * y[i];
  return s;
}

LpSolution solve_primal(const LpModel& model, const InequalityForm& f, const LpOptions& opt) {
  const auto sf = to_standard_form(f);
  Simplex simplex(sf, opt);
  const auto result = simplex.run();
  LpSolution sol;
  sol.status = map_result(result);
  sol.iterations = simplex.iterations();
  sol.dual_infeasibility = simplex.dual_infeasibility();
  const auto v = simplex.values();
  sol.x = recover_x(f, v);
  std::vector<double> y(sf.m);
  for (std::size_t i = 0; i < sf.m; ++i) y[i] = sf.row_sign[i] * simplex.duals()[i];
  sol.duals.assign(model.row_count(), 0.0);
  for (std::size_t i = 0; i < f.rows.size(); ++i) {
    if (f.rows[i].model_row >= 0) sol.duals[static_cast<std::size_t>(f.rows[i].model_row)] = y[i];
  }
  sol.dual_objective = dual_objective_of(f, y);
  for (auto r : simplex.infeasible_rows()) {
    if (f.rows[r].model_row >= 0) sol.infeasible_rows.push_back(static_cast<std::size_t>(f.rows[r].model_row));
  }
  if (result == Simplex::Result::singular) sol.message = "basis matrix became singular";
  if (result == Simplex::Result::iteration_limit) sol.message = "iteration limit reached";
  return sol;
}

// Solves max b'u s.t. A'u <= c (u sign-constrained by row sense), whose basis
// has one row per column of the inequality form, and reads the primal off the
// multipliers of its rows.
LpSolution solve_via_dual(const LpModel& model, const InequalityForm& f, const LpOptions& opt) {
  LpModel dual;
  for (const auto& row : f.rows) {
    double lo = 0.0;
    double hi = LpModel::inf;
    if (row.sense == Sense::less_equal) {
      lo = -LpModel::inf;
      hi = 0.0;
    } else if (row.sense == Sense::equal) {
      lo = -LpModel::inf;
    }
    dual.add_variable(-row.rhs, lo, hi);
  }
  std::vector<std::vector<LpTerm>> cols(f.columns);
  for (std::size_t i = 0; i < f.rows.size(); ++i) {
    for (const auto& t : f.rows[i].terms) cols[t.var].push_back({i, t.coef});
  }
  for (std::size_t j = 0; j < f.columns; ++j) dual.add_row(cols[j], Sense::less_equal, f.cost[j]);

  LpOptions inner = opt;
  inner.formulation = LpOptions::Formulation::primal;
  const auto dual_sol = solve(dual, inner);

  LpSolution sol;
  sol.solved_via_dual = true;
  sol.iterations = dual_sol.iterations;
  sol.dual_infeasibility = dual_sol.dual_infeasibility;
  switch (dual_sol.status) {
    case LpStatus::optimal: sol.status = LpStatus::optimal; break;
    case LpStatus::unbounded: sol.status = LpStatus::infeasible; break;
    default: sol.status = dual_sol.status; break;
  }
  std::vector<double> v(f.columns, 0.0);
  if (dual_sol.status == LpStatus::optimal) {
    for (std::size_t j = 0; j < f.columns; ++j) v[j] = std::max(0.0, -dual_sol.duals[j]);
  }
  sol.x = recover_x(f, v);
  sol.duals.assign(model.row_count(), 0.0);
  for (std::size_t i = 0; i < f.rows.size(); ++i) {
    if (f.rows[i].model_row >= 0 && !dual_sol.x.empty()) {
      sol.duals[static_cast<std::size_t>(f.rows[i].model_row)] = dual_sol.x[i];
    }
  }
  sol.dual_objective = dual_sol.x.empty() ? 0.0 : dual_objective_of(f, dual_sol.x);
  sol.message = dual_sol.message;
  return sol;
}

}  // namespace

LpSolution solve(const LpModel& model, const LpOptions& options) {
  const auto f = to_inequality_form(model);
  bool use_dual = false;
  switch (options.formulation) {
    case LpOptions::Formulation::automatic: use_dual = f.rows.size() > f.columns; break;
    case LpOptions::Formulation::dual: use_dual = true; break;
    case LpOptions::Formulation::primal: use_dual = false; break;
  }
  LpSolution sol;
  if (use_dual && f.columns > 0) {
    sol = solve_via_dual(model, f, options);
    // A failed or infeasible dual does not classify the primal; fall back.
    if (sol.status != LpStatus::optimal && sol.status != LpStatus::infeasible) {
      const auto iters = sol.iterations;
      sol = solve_primal(model, f, options);
      sol.iterations += iters;
    }
  } else {
    sol = solve_primal(model, f, options);
  }
  certify(model, options, sol);
  if (sol.status == LpStatus::numerical_failure && sol.solved_via_dual) {
    // Second opinion from the primal route before reporting a failure.
    auto primal = solve_primal(model, f, options);
    primal.iterations += sol.iterations;
    certify(model, options, primal);
    if (primal.status != LpStatus::numerical_failure) return primal;
  }
  return sol;
}

namespace {

std::string lp_name(const std::string& given, char prefix, std::size_t index) {
  std::string out;
  for (char c : given) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') out.push_back(c);
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0])) || out[0] == '.') {
    out = std::string(1, prefix) + std::to_string(index);
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_lp_format(const LpModel& model, std::ostream& os) {
  std::vector<std::string> names(model.variable_count());
  for (std::size_t j = 0; j < names.size(); ++j) names[j] = lp_name(model.variable_name(j), 'x', j);
  auto write_terms = [&](auto&& terms) {
    bool any = false;
    for (const auto& [var, coef] : terms) {
      os << (coef < 0 ? " - " : (any ? " + " : " ")) << num(std::abs(coef)) << ' ' << names[var];
      any = true;
    }
    if (!any) os << " 0 " << (names.empty() ? std::string("x0") : names[0]);
  };
  os << "\\ " << model.variable_count() << " variables, " << model.row_count() << " rows\n";
  os << "Minimize\n obj:";
  std::vector<std::pair<std::size_t, double>> obj;
  for (std::size_t j = 0; j < model.variable_count(); ++j) {
    if (model.cost(j) != 0.0) obj.emplace_back(j, model.cost(j));
  }
  write_terms(obj);
  os << "\nSubject To\n";
  for (std::size_t i = 0; i < model.row_count(); ++i) {
    const auto& row = model.row(i);
    os << ' ' << lp_name(row.name, 'r', i) << ':';
    std::vector<std::pair<std::size_t, double>> terms;
    for (const auto& t : row.terms) terms.emplace_back(t.var, t.coef);
    write_terms(terms);
    switch (row.sense) {
      case Sense::greater_equal: os << " >= "; break;
      case Sense::less_equal: os << " <= "; break;
      case Sense::equal: os << " = "; break;
    }
    os << num(row.rhs) << '\n';
  }
  os << "Bounds\n";
  for (std::size_t j = 0; j < model.variable_count(); ++j) {
    const double lo = model.lower(j);
    const double hi = model.upper(j);
    if (!std::isfinite(lo) && !std::isfinite(hi)) {
      os << ' ' << names[j] << " free\n";
    } else if (!std::isfinite(lo)) {
      os << " -inf <= " << names[j] << " <= " << num(hi) << '\n';
    } else if (!std::isfinite(hi)) {
      os << ' ' << names[j] << " >= " << num(lo) << '\n';
    } else {
      os << ' ' << num(lo) << " <= " << names[j] << " <= " << num(hi) << '\n';
    }
  }
  os << "End\n";
}

}  // namespace ltmopt
