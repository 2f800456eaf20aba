#include "ltmopt/typestats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "ltmopt/error.hpp"

namespace ltmopt {

namespace {

std::string describe(const AgentType& w) {
  return "(d=" + std::to_string(w.d) + ", k=" + std::to_string(w.k) + ", r=" + std::to_string(w.r) +
         ")";
}

constexpr double kMassTolerance = 1e-12;

}  // namespace

void validate_type(const AgentType& w) {
  if (w.d < 0 || w.k < 0) throw InvalidArgument("negative degree in type " + describe(w));
  if (w.r < 0 || w.r > w.k) throw InvalidArgument("threshold outside [0, k] in type " + describe(w));
  if (w.cost.size() != static_cast<std::size_t>(w.r) + 1) {
    throw InvalidArgument("cost table of type " + describe(w) + " must have r + 1 entries");
  }
  if (w.cost[0] != 0.0) throw InvalidArgument("cost table of type " + describe(w) + " has c(0) != 0");
  for (std::size_t e = 1; e < w.cost.size(); ++e) {
    if (!std::isfinite(w.cost[e]) || w.cost[e] < w.cost[e - 1]) {
      throw InvalidArgument("cost table of type " + describe(w) +
                            " must be finite and non-decreasing");
    }
  }
}

AgentType reduced_type(const AgentType& w, std::int32_t eta) {
  if (eta < 0 || eta > w.r) {
    throw InvalidArgument("reduction " + std::to_string(eta) + " outside [0, r] for type " +
                          describe(w));
  }
  AgentType out{w.d, w.k, w.r - eta, {}};
  out.cost.assign(w.cost.begin(), w.cost.begin() + (w.r - eta + 1));
  return out;
}

std::optional<std::size_t> Statistics::find(const AgentType& w) const {
  const auto it = std::lower_bound(types.begin(), types.end(), w);
  if (it == types.end() || *it != w) return std::nullopt;
  return static_cast<std::size_t>(it - types.begin());
}

void Statistics::validate() const {
  if (types.size() != mass.size()) throw InvalidArgument("statistics: types and masses differ in size");
  if (!counts.empty() && counts.size() != types.size()) {
    throw InvalidArgument("statistics: counts and types differ in size");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < types.size(); ++i) {
    validate_type(types[i]);
    if (i > 0 && !(types[i - 1] < types[i])) {
      throw InvalidArgument("statistics: types must be sorted and unique");
    }
    if (!(mass[i] >= 0.0) || !std::isfinite(mass[i])) {
      throw InvalidArgument("statistics: negative or non-finite mass for type " + describe(types[i]));
    }
    total += mass[i];
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw InvalidArgument("statistics: masses sum to " + std::to_string(total) + ", not 1");
  }
}

Statistics make_statistics(std::vector<std::pair<AgentType, double>> entries, bool keep_zero) {
  std::map<AgentType, double> merged;
  for (auto& [w, m] : entries) merged[std::move(w)] += m;
  Statistics p;
  for (auto& [w, m] : merged) {
    if (m == 0.0 && !keep_zero) continue;
    p.types.push_back(w);
    p.mass.push_back(m);
  }
  return p;
}

Statistics make_statistics_from_counts(std::vector<std::pair<AgentType, std::int64_t>> entries) {
  std::map<AgentType, std::int64_t> merged;
  std::int64_t n = 0;
  for (auto& [w, c] : entries) {
    if (c < 0) throw InvalidArgument("negative type count");
    merged[std::move(w)] += c;
    n += c;
  }
  if (n <= 0) throw InvalidArgument("statistics need a positive population");
  Statistics p;
  p.population = n;
  for (auto& [w, c] : merged) {
    p.types.push_back(w);
    p.counts.push_back(c);
    p.mass.push_back(static_cast<double>(c) / static_cast<double>(n));
  }
  return p;
}

void StatIntervention::validate_against(const Statistics& p0) const {
  if (types.size() != p0.types.size() || xi.size() != p0.types.size()) {
    throw InfeasibleIntervention("intervention and statistics have different type sets");
  }
  for (std::size_t w = 0; w < types.size(); ++w) {
    if (types[w] != p0.types[w]) {
      throw InfeasibleIntervention("intervention type " + describe(types[w]) +
                                   " does not match statistics type " + describe(p0.types[w]));
    }
    if (xi[w].size() != static_cast<std::size_t>(types[w].r) + 1) {
      throw InfeasibleIntervention("intervention row for type " + describe(types[w]) +
                                   " must have r + 1 entries");
    }
    double sum = 0.0;
    for (double v : xi[w]) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw InfeasibleIntervention("negative or non-finite intervention mass for type " +
                                     describe(types[w]));
      }
      sum += v;
    }
    if (std::abs(sum - p0.mass[w]) > kMassTolerance) {
      throw InfeasibleIntervention("intervention masses of type " + describe(types[w]) +
                                   " sum to " + std::to_string(sum) + " instead of " +
                                   std::to_string(p0.mass[w]));
    }
  }
}

namespace cost_rules {

CostRule linear() {
  return [](std::int32_t, std::int32_t, std::int32_t r) {
    std::vector<double> c(static_cast<std::size_t>(r) + 1);
    for (std::int32_t e = 0; e <= r; ++e) c[e] = e;
    return c;
  };
}

CostRule seeding() {
  return [](std::int32_t, std::int32_t, std::int32_t r) {
    std::vector<double> c(static_cast<std::size_t>(r) + 1, static_cast<double>(r));
    c[0] = 0.0;
    return c;
  };
}

CostRule unit_seeding() {
  return [](std::int32_t, std::int32_t, std::int32_t r) {
    std::vector<double> c(static_cast<std::size_t>(r) + 1, 1.0);
    c[0] = 0.0;
    return c;
  };
}

}  // namespace cost_rules

ExtractedStatistics extract_statistics(const MultiGraph& g, const ThresholdVector& rho,
                                       const CostRule& cost_rule) {
  validate_thresholds(g, rho);
  std::map<AgentType, std::int64_t> counts;
  std::vector<AgentType> node_types;
  node_types.reserve(static_cast<std::size_t>(g.node_count()));
  for (NodeId i = 0; i < g.node_count(); ++i) {
    AgentType w{g.in_degree(i), g.out_degree(i), rho.values[i], {}};
    w.cost = cost_rule(w.d, w.k, w.r);
    validate_type(w);
    ++counts[w];
    node_types.push_back(std::move(w));
  }
  ExtractedStatistics out;
  std::vector<std::pair<AgentType, std::int64_t>> entries(counts.begin(), counts.end());
  out.stats = make_statistics_from_counts(std::move(entries));
  out.type_of_node.reserve(node_types.size());
  for (const auto& w : node_types) {
    out.type_of_node.push_back(static_cast<std::int32_t>(*out.stats.find(w)));
  }
  return out;
}

StatIntervention null_intervention(const Statistics& p0) {
  StatIntervention xi;
  xi.types = p0.types;
  xi.xi.reserve(p0.size());
  for (std::size_t w = 0; w < p0.size(); ++w) {
    std::vector<double> row(static_cast<std::size_t>(p0.types[w].r) + 1, 0.0);
    row[0] = p0.mass[w];
    xi.xi.push_back(std::move(row));
  }
  return xi;
}

Statistics post_statistics(const Statistics& p0, const StatIntervention& xi, bool drop_zero) {
  xi.validate_against(p0);
  std::map<AgentType, double> mass;
  for (std::size_t w = 0; w < p0.size(); ++w) {
    const auto& type = p0.types[w];
    double moved = 0.0;
    for (std::int32_t eta = 1; eta <= type.r; ++eta) moved += xi.xi[w][eta];
    mass[type] += p0.mass[w] - moved;
  }
  for (std::size_t w = 0; w < p0.size(); ++w) {
    const auto& type = p0.types[w];
    for (std::int32_t eta = 1; eta <= type.r; ++eta) {
      if (xi.xi[w][eta] > 0.0) mass[reduced_type(type, eta)] += xi.xi[w][eta];
    }
  }
  Statistics p;
  for (auto& [w, m] : mass) {
    if (drop_zero && m <= 0.0) continue;
    p.types.push_back(w);
    p.mass.push_back(m < 0.0 ? 0.0 : m);
  }
  return p;
}

double intervention_cost(const StatIntervention& xi) {
  double total = 0.0;
  for (std::size_t w = 0; w < xi.types.size(); ++w) {
    const auto& c = xi.types[w].cost;
    for (std::size_t eta = 1; eta < xi.xi[w].size(); ++eta) total += xi.xi[w][eta] * c[eta];
  }
  return total;
}

double moment(const Statistics& p, Moment which) {
  double s = 0.0;
  for (std::size_t w = 0; w < p.size(); ++w) {
    const double d = p.types[w].d;
    const double k = p.types[w].k;
    double f = 0.0;
    switch (which) {
      case Moment::d: f = d; break;
      case Moment::k: f = k; break;
      case Moment::d2: f = d * d; break;
      case Moment::k2: f = k * k; break;
      case Moment::dk: f = d * k; break;
    }
    s += p.mass[w] * f;
  }
  return s;
}

double branching_nu(const Statistics& p) {
  const double md = moment(p, Moment::d);
  if (md <= 0.0) return 0.0;
  return moment(p, Moment::dk) / md - 1.0;
}

WellPosedness check_well_posed(std::int64_t n, const Statistics& p) {
  if (n < 1) throw InvalidArgument("population size must be at least 1");
  WellPosedness out;
  const auto nd = static_cast<double>(n);
  out.integral = true;
  for (double m : p.mass) {
    const double scaled = nd * m;
    if (scaled < -1e-9 || std::abs(scaled - std::round(scaled)) > 1e-9) out.integral = false;
  }
  const double md = moment(p, Moment::d);
  const double mk = moment(p, Moment::k);
  out.balanced = std::abs(md - mk) <= 1e-12 * std::max(1.0, std::max(md, mk));
  out.no_self_loop = true;
  for (std::size_t w = 0; w < p.size(); ++w) {
    if (p.mass[w] > 0.0 && p.types[w].d + p.types[w].k > nd * md + 1e-9) out.no_self_loop = false;
  }
  return out;
}

DegreeSummary degree_summary(const Statistics& p) {
  DegreeSummary s;
  bool first = true;
  for (std::size_t w = 0; w < p.size(); ++w) {
    if (!(p.mass[w] > 0.0)) continue;
    const auto& t = p.types[w];
    if (first) {
      s = {t.d, t.d, t.k};
      first = false;
    } else {
      s.d_min = std::min(s.d_min, t.d);
      s.d_max = std::max(s.d_max, t.d);
      s.k_max = std::max(s.k_max, t.k);
    }
  }
  return s;
}

}  // namespace ltmopt
