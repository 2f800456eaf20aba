#include "ltmopt/planner.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ltmopt/binomial.hpp"
#include "ltmopt/error.hpp"
#include "ltmopt/meanfield.hpp"
#include "ltmopt/parallel.hpp"

namespace ltmopt {

void PlannerConfig::validate() const {
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("eps must lie in (0, 1]");
  if (grid_n == 0) throw InvalidArgument("grid size N must be at least 1");
  if (delta && !(*delta > 0.0 && std::isfinite(*delta))) {
    throw InvalidArgument("delta must be a positive finite number or auto");
  }
}

double alpha_eps(const Statistics& p0, double eps, bool allow_zero) {
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("eps must lie in (0, 1]");
  const auto deg = degree_summary(p0);
  const double mean_d = moment(p0, Moment::d);
  if (deg.d_min == 0) {
    if (allow_zero) return 0.0;
    throw InvalidArgument(
        "some agents have in-degree 0, so alpha_eps = 0 and the constraint domain reaches z = 1, "
        "where phi(1) = 1 cannot exceed z; remove such agents or pass --exclude-right-endpoint");
  }
  return std::clamp(eps * deg.d_min / mean_d, 0.0, 1.0);
}

double delta_N(const Statistics& p0, double eps, std::size_t n, bool allow_zero) {
  if (n == 0) throw InvalidArgument("grid size N must be at least 1");
  const double alpha = alpha_eps(p0, eps, allow_zero);
  return (1.0 - alpha) / (2.0 * static_cast<double>(n)) * derivative_bound(p0);
}

namespace {

std::vector<double> make_grid(double alpha, std::size_t n, bool exclude_right) {
  const std::size_t count = exclude_right ? n : n + 1;
  std::vector<double> z(count);
  for (std::size_t i = 0; i < count; ++i) {
    z[i] = (1.0 - alpha) * static_cast<double>(i) / static_cast<double>(n);
  }
  return z;
}

// Rows of binomial pmfs b_k(u; z), u = 0..k, for the distinct out-degrees.
class PmfRows {
 public:
  PmfRows(const std::vector<std::int32_t>& ks, double z) : ks_(ks), rows_(ks.size()) {
    for (std::size_t i = 0; i < ks.size(); ++i) {
      rows_[i].resize(static_cast<std::size_t>(ks[i]) + 1);
      for (std::int32_t u = 0; u <= ks[i]; ++u) rows_[i][u] = binomial_pmf(ks[i], u, z);
    }
  }
  const std::vector<double>& row(std::int32_t k) const {
    return rows_[static_cast<std::size_t>(std::lower_bound(ks_.begin(), ks_.end(), k) - ks_.begin())];
  }

 private:
  const std::vector<std::int32_t>& ks_;
  std::vector<std::vector<double>> rows_;
};

// Coefficients below this only ever lower the left-hand side when dropped.
constexpr double kCoefficientFloor = 1e-14;

}  // namespace

PlannerLp build_lp(const Statistics& p0, const PlannerConfig& cfg) {
  cfg.validate();
  PlannerLp out;
  out.alpha = alpha_eps(p0, cfg.eps, cfg.exclude_right_endpoint);
  out.delta = cfg.delta ? *cfg.delta : delta_N(p0, cfg.eps, cfg.grid_n, cfg.exclude_right_endpoint);
  out.grid = make_grid(out.alpha, cfg.grid_n, cfg.exclude_right_endpoint);
  const double mean_d0 = moment(p0, Moment::d);

  // Candidate columns x_{w, eta}, with the a_w(eta, z_i) of every grid point.
  std::vector<PlanColumn> candidates;
  std::vector<std::size_t> first_column(p0.size() + 1, 0);
  std::vector<std::int32_t> ks;
  for (std::size_t w = 0; w < p0.size(); ++w) {
    first_column[w] = candidates.size();
    const auto& t = p0.types[w];
    if (p0.mass[w] <= 0.0) continue;
    for (std::int32_t eta = 1; eta <= t.r; ++eta) {
      if (cfg.full_reduction_only && eta != t.r) continue;
      candidates.push_back({w, eta});
    }
    if (t.r > 0) ks.push_back(t.k);
  }
  first_column[p0.size()] = candidates.size();
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  const std::size_t rows = out.grid.size();
  std::vector<std::vector<double>> coef(candidates.size(), std::vector<double>(rows, 0.0));
  const MeanFieldCurve curve0(p0);
  out.grid_rhs.assign(rows, 0.0);
  parallel_for(rows, cfg.jobs, [&](std::size_t i) {
    const double z = out.grid[i];
    out.grid_rhs[i] = z + out.delta - curve0.phi(z);
    if (candidates.empty()) return;
    const PmfRows pmf(ks, z);
    for (std::size_t w = 0; w < p0.size(); ++w) {
      if (first_column[w] == first_column[w + 1]) continue;
      const auto& t = p0.types[w];
      const auto& b = pmf.row(t.k);
      const double scale = t.d / mean_d0;
      // phi_{k, r-eta} - phi_{k, r} = sum_{u = r-eta}^{r-1} b_k(u)
      double acc = 0.0;
      std::size_t c = first_column[w];
      for (std::int32_t eta = 1; eta <= t.r; ++eta) {
        acc += b[static_cast<std::size_t>(t.r - eta)];
        if (c < first_column[w + 1] && candidates[c].eta == eta) {
          const double a = scale * acc;
          coef[c][i] = a < kCoefficientFloor ? 0.0 : a;
          ++c;
        }
      }
    }
  });

  std::vector<std::size_t> var_of(candidates.size(), static_cast<std::size_t>(-1));
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto& col = candidates[c];
    const auto& t = p0.types[col.type];
    const double cost = t.cost[static_cast<std::size_t>(col.eta)];
    const bool acts = std::any_of(coef[c].begin(), coef[c].end(), [](double a) { return a > 0.0; });
    if (!acts && cost > 0.0) {
      ++out.pruned;
      continue;
    }
    var_of[c] = out.model.add_variable(
        cost, 0.0, LpModel::inf, "x_w" + std::to_string(col.type) + "_e" + std::to_string(col.eta));
    out.columns.push_back(col);
  }

  std::vector<LpTerm> terms;
  for (std::size_t i = 0; i < rows; ++i) {
    terms.clear();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (var_of[c] != static_cast<std::size_t>(-1) && coef[c][i] != 0.0) {
        terms.push_back({var_of[c], coef[c][i]});
      }
    }
    out.model.add_row(terms, Sense::greater_equal, out.grid_rhs[i], "grid_" + std::to_string(i));
  }
  for (std::size_t w = 0; w < p0.size(); ++w) {
    terms.clear();
    for (std::size_t c = first_column[w]; c < first_column[w + 1]; ++c) {
      if (var_of[c] != static_cast<std::size_t>(-1)) terms.push_back({var_of[c], 1.0});
    }
    if (terms.empty()) continue;
    out.model.add_row(terms, Sense::less_equal, p0.mass[w], "budget_w" + std::to_string(w));
    out.budget_type.push_back(w);
  }
  return out;
}

StatIntervention intervention_from_lp(const Statistics& p0, const PlannerLp& lp,
                                      std::span<const double> x) {
  if (x.size() != lp.columns.size()) {
    throw DimensionMismatch("LP solution has " + std::to_string(x.size()) + " values, expected " +
                            std::to_string(lp.columns.size()));
  }
  StatIntervention xi = null_intervention(p0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto& col = lp.columns[j];
    xi.xi[col.type][static_cast<std::size_t>(col.eta)] += std::max(0.0, x[j]);
  }
  for (std::size_t w = 0; w < p0.size(); ++w) {
    auto& row = xi.xi[w];
    double moved = 0.0;
    for (std::size_t eta = 1; eta < row.size(); ++eta) moved += row[eta];
    if (moved > p0.mass[w]) {
      const double s = p0.mass[w] / moved;
      moved = 0.0;
      for (std::size_t eta = 1; eta < row.size(); ++eta) {
        row[eta] *= s;
        moved += row[eta];
      }
    }
    row[0] = std::max(0.0, p0.mass[w] - moved);
  }
  return xi;
}

namespace {

struct Support {
  const AgentType* type;
  std::int32_t eta;
  double mass;
};

std::vector<Support> support_of(const Statistics& p0, const StatIntervention& xi) {
  std::vector<Support> s;
  for (std::size_t w = 0; w < p0.size(); ++w) {
    for (std::size_t eta = 1; eta < xi.xi[w].size(); ++eta) {
      if (xi.xi[w][eta] != 0.0) s.push_back({&p0.types[w], static_cast<std::int32_t>(eta), xi.xi[w][eta]});
    }
  }
  return s;
}

void track(MarginReport& r, double z, double value) {
  if (r.points == 0 || value < r.margin) {
    r.margin = value;
    r.argmin = z;
  }
  ++r.points;
}

}  // namespace

RelaxedAudit audit_relaxed(const Statistics& p0, const StatIntervention& xi, double alpha,
                           std::size_t m, bool exclude_right_endpoint) {
  if (m == 0) throw InvalidArgument("audit grid needs at least one interval");
  xi.validate_against(p0);
  const MeanFieldCurve curve0(p0);
  const MeanFieldCurve curve1(post_statistics(p0, xi, true));
  const double mean_d0 = curve0.mean_in_degree();
  const auto support = support_of(p0, xi);

  RelaxedAudit out;
  const auto grid = make_grid(alpha, m, exclude_right_endpoint);
  out.decomposed.upper = out.direct.upper = grid.empty() ? 0.0 : grid.back();
  for (double z : grid) {
    double dec = curve0.phi(z);
    for (const auto& s : support) dec += coeff_a(*s.type, s.eta, z, mean_d0) * s.mass;
    const double dir = curve1.phi(z);
    track(out.decomposed, z, dec - z);
    track(out.direct, z, dir - z);
    out.discrepancy = std::max(out.discrepancy, std::abs(dec - dir));
  }
  return out;
}

MarginReport audit_original(const Statistics& p0, const StatIntervention& xi, double eps,
                            std::size_t m) {
  if (m == 0) throw InvalidArgument("audit grid needs at least one interval");
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("eps must lie in (0, 1]");
  xi.validate_against(p0);
  const auto post = post_statistics(p0, xi, true);
  const MeanFieldCurve curve(post);
  MarginReport out;
  out.upper = psi_inverse(post, 1.0 - eps);
  const std::size_t count = out.upper > 0.0 ? m + 1 : 1;
  for (std::size_t j = 0; j < count; ++j) {
    const double z = out.upper * static_cast<double>(j) / static_cast<double>(m);
    track(out, z, curve.phi(z) - z);
  }
  return out;
}

MomentSummary moment_summary(const Statistics& p) {
  return {moment(p, Moment::d),  moment(p, Moment::k),  moment(p, Moment::d2),
          moment(p, Moment::k2), moment(p, Moment::dk), branching_nu(p)};
}

PlanResult plan(const Statistics& p0, const PlannerConfig& cfg) {
  PlanResult res;
  res.config = cfg;
  const auto lp = build_lp(p0, cfg);
  res.alpha = lp.alpha;
  res.delta_used = lp.delta;
  res.delta_n = delta_N(p0, cfg.eps, cfg.grid_n, cfg.exclude_right_endpoint);
  res.guarantee_regime = res.delta_used >= res.delta_n;
  res.variables = lp.model.variable_count();
  res.grid_rows = lp.grid.size();
  res.budget_rows = lp.budget_type.size();
  res.pruned = lp.pruned;
  res.moments_before = moment_summary(p0);
  res.lp = solve(lp.model, cfg.lp);
  res.feasible = res.lp.status == LpStatus::optimal;

  if (!res.feasible) {
    res.xi = null_intervention(p0);
    res.moments_after = res.moments_before;
    res.message = std::string("LP ") + to_string(res.lp.status);
    if (!res.lp.message.empty()) res.message += ": " + res.lp.message;
    if (res.lp.status == LpStatus::infeasible) {
      // Best each row can do alone: every budget spent on its largest coefficient.
      std::vector<double> best(lp.grid.size(), 0.0);
      std::vector<double> a_max(p0.size());
      for (std::size_t i = 0; i < lp.grid.size(); ++i) {
        std::fill(a_max.begin(), a_max.end(), 0.0);
        for (const auto& t : lp.model.row(i).terms) {
          auto& a = a_max[lp.columns[t.var].type];
          a = std::max(a, t.coef);
        }
        for (std::size_t w = 0; w < p0.size(); ++w) best[i] += p0.mass[w] * a_max[w];
      }
      for (std::size_t i = 0; i < lp.grid.size(); ++i) {
        if (best[i] < lp.grid_rhs[i] - cfg.lp.feasibility_tol) res.binding_points.push_back(lp.grid[i]);
      }
      if (res.binding_points.empty()) {
        for (auto row : res.lp.infeasible_rows) {
          if (row < lp.grid.size()) res.binding_points.push_back(lp.grid[row]);
        }
      }
    }
    return res;
  }

  res.xi = intervention_from_lp(p0, lp, res.lp.x);
  res.cost = intervention_cost(res.xi);
  res.lp_violation = check_solution(lp.model, res.lp.x).max_violation;
  const auto post = post_statistics(p0, res.xi, true);
  const MeanFieldCurve curve1(post);
  for (std::size_t i = 0; i < lp.grid.size(); ++i) {
    const double g = curve1.phi(lp.grid[i]) - lp.grid[i];
    res.grid_margin = i == 0 ? g : std::min(res.grid_margin, g);
  }
  res.relaxed = audit_relaxed(p0, res.xi, res.alpha, cfg.audit_points(), cfg.exclude_right_endpoint);
  res.original = audit_original(p0, res.xi, cfg.eps, cfg.audit_points());
  res.moments_after = moment_summary(post);
  return res;
}

}  // namespace ltmopt
