#include "ltmopt/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <unordered_map>

#include "ltmopt/error.hpp"
#include "ltmopt/rng.hpp"

namespace ltmopt {

namespace {

std::vector<std::string_view> tokens_of(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool is_comment_or_blank(std::string_view line) {
  for (char c : line) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '#' || c == '%';
  }
  return true;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  return in;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

LoadedNetwork read_edge_list(std::istream& in, const std::string& source, const EdgeListOptions& opt) {
  LoadedNetwork net;
  std::unordered_map<std::string, NodeId> ids;
  auto id_of = [&](std::string_view token) {
    auto [it, inserted] = ids.try_emplace(std::string(token), static_cast<NodeId>(net.labels.size()));
    if (inserted) net.labels.emplace_back(token);
    return it->second;
  };
  std::vector<Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_comment_or_blank(line)) continue;
    const auto tok = tokens_of(line);
    if (tok.size() < 2) throw ParseError(source, lineno, "expected \"tail head\", got \"" + line + "\"");
    if (tok[0] == tok[1]) {
      if (!opt.drop_self_loops) {
        throw ParseError(source, lineno, "self-loop on node " + std::string(tok[0]) +
                                             " (use --drop-self-loops to skip such lines)");
      }
      ++net.dropped_self_loops;
      continue;
    }
    const NodeId u = id_of(tok[0]);
    const NodeId v = id_of(tok[1]);
    edges.push_back({u, v});
    if (opt.undirected) edges.push_back({v, u});
  }
  if (edges.empty()) throw ParseError(source, lineno, "no edges found; a network needs at least one node");
  net.graph = MultiGraph(static_cast<NodeId>(net.labels.size()), edges);
  return net;
}

LoadedNetwork load_edge_list(const std::string& path, const EdgeListOptions& opt) {
  auto in = open_input(path);
  return read_edge_list(in, path, opt);
}

void write_id_map(const LoadedNetwork& net, std::ostream& os) {
  os << "id,label\n";
  for (std::size_t i = 0; i < net.labels.size(); ++i) os << i << ',' << net.labels[i] << '\n';
}

std::string ThresholdRule::text() const {
  switch (kind) {
    case Kind::half_out_degree: return "half-out-degree";
    case Kind::uniform_random: return "uniform-random";
    case Kind::file: return "file:" + path;
  }
  return {};
}

ThresholdRule parse_threshold_rule(const std::string& text) {
  if (text == "half-out-degree") return {ThresholdRule::Kind::half_out_degree, {}};
  if (text == "uniform-random") return {ThresholdRule::Kind::uniform_random, {}};
  if (text.starts_with("file:") && text.size() > 5) return {ThresholdRule::Kind::file, text.substr(5)};
  throw InvalidArgument("unknown threshold rule '" + text +
                        "' (expected half-out-degree, uniform-random or file:PATH)");
}

ThresholdResult make_thresholds(const LoadedNetwork& net, const ThresholdRule& rule, std::uint64_t seed,
                                bool clamp) {
  const auto& g = net.graph;
  const auto n = static_cast<std::size_t>(g.node_count());
  ThresholdResult out;
  out.rho.values.assign(n, 0);
  switch (rule.kind) {
    case ThresholdRule::Kind::half_out_degree:
      for (std::size_t i = 0; i < n; ++i) out.rho.values[i] = g.out_degree(static_cast<NodeId>(i)) / 2;
      break;
    case ThresholdRule::Kind::uniform_random: {
      Rng rng(seed);
      for (std::size_t i = 0; i < n; ++i) {
        const auto k = g.out_degree(static_cast<NodeId>(i));
        out.rho.values[i] = k > 0 ? 1 + static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(k))) : 0;
      }
      break;
    }
    case ThresholdRule::Kind::file: {
      std::unordered_map<std::string_view, std::size_t> index;
      for (std::size_t i = 0; i < n; ++i) index.emplace(net.labels[i], i);
      std::vector<char> seen(n, 0);
      auto in = open_input(rule.path);
      std::string line;
      std::size_t lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        if (is_comment_or_blank(line)) continue;
        const auto tok = tokens_of(line);
        std::int32_t r = 0;
        if (tok.size() < 2 || !parse_number(tok[1], r)) {
          throw ParseError(rule.path, lineno, "expected \"label threshold\"");
        }
        const auto it = index.find(tok[0]);
        if (it == index.end()) throw ParseError(rule.path, lineno, "unknown node " + std::string(tok[0]));
        const auto i = it->second;
        const auto k = g.out_degree(static_cast<NodeId>(i));
        if (r < 0) throw ParseError(rule.path, lineno, "negative threshold");
        if (r > k) {
          if (!clamp) {
            throw ParseError(rule.path, lineno, "threshold " + std::to_string(r) + " exceeds out-degree " +
                                                    std::to_string(k) + " (use --clamp-thresholds)");
          }
          r = k;
          ++out.clamped;
        }
        out.rho.values[i] = r;
        seen[i] = 1;
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (!seen[i]) throw InvalidArgument(rule.path + ": no threshold for node " + net.labels[i]);
      }
      break;
    }
  }
  validate_thresholds(g, out.rho);
  return out;
}

CostRule parse_cost_rule(const std::string& text) {
  if (text == "linear") return cost_rules::linear();
  if (text == "seeding") return cost_rules::seeding();
  if (text == "unit-seeding") return cost_rules::unit_seeding();
  if (!text.starts_with("file:") || text.size() <= 5) {
    throw InvalidArgument("unknown cost rule '" + text + "' (expected linear, seeding, unit-seeding or file:PATH)");
  }
  const std::string path = text.substr(5);
  auto in = open_input(path);
  auto table = std::make_shared<std::map<std::array<std::int32_t, 3>, std::vector<double>>>();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_comment_or_blank(line)) continue;
    const auto tok = tokens_of(line);
    std::array<std::int32_t, 3> key{};
    if (tok.size() < 4 || !parse_number(tok[0], key[0]) || !parse_number(tok[1], key[1]) ||
        !parse_number(tok[2], key[2])) {
      throw ParseError(path, lineno, "expected \"d k r c0 .. cr\"");
    }
    if (tok.size() != static_cast<std::size_t>(key[2]) + 4) {
      throw ParseError(path, lineno, "expected r + 1 = " + std::to_string(key[2] + 1) + " costs");
    }
    std::vector<double> cost;
    for (std::size_t i = 3; i < tok.size(); ++i) {
      double c = 0.0;
      if (!parse_number(tok[i], c)) throw ParseError(path, lineno, "bad cost " + std::string(tok[i]));
      cost.push_back(c);
    }
    try {
      validate_type({key[0], key[1], key[2], cost});
    } catch (const Error& e) {
      throw ParseError(path, lineno, e.what());
    }
    (*table)[key] = std::move(cost);
  }
  return [table, path](std::int32_t d, std::int32_t k, std::int32_t r) {
    const auto it = table->find({d, k, r});
    if (it == table->end()) {
      throw InvalidArgument(path + ": no cost table for d=" + std::to_string(d) + " k=" + std::to_string(k) +
                            " r=" + std::to_string(r));
    }
    return it->second;
  };
}

Json to_json(const AgentType& w) { return Json{{"d", w.d}, {"k", w.k}, {"r", w.r}, {"cost", w.cost}}; }

AgentType agent_type_from_json(const Json& j) {
  AgentType w{j.at("d").get<std::int32_t>(), j.at("k").get<std::int32_t>(), j.at("r").get<std::int32_t>(),
              j.at("cost").get<std::vector<double>>()};
  validate_type(w);
  return w;
}

Json to_json(const Statistics& p) {
  Json types = Json::array();
  for (std::size_t w = 0; w < p.size(); ++w) {
    auto rec = to_json(p.types[w]);
    rec["mass"] = p.mass[w];
    if (!p.counts.empty()) rec["count"] = p.counts[w];
    types.push_back(std::move(rec));
  }
  Json out;
  out["population"] = p.population;
  out["types"] = std::move(types);
  return out;
}

Statistics statistics_from_json(const Json& j) {
  try {
    const auto& types = j.at("types");
    const auto population = j.value("population", std::int64_t{0});
    const bool exact = population > 0 && std::all_of(types.begin(), types.end(),
                                                     [](const Json& t) { return t.contains("count"); });
    if (exact) {
      std::vector<std::pair<AgentType, std::int64_t>> entries;
      for (const auto& t : types) entries.emplace_back(agent_type_from_json(t), t.at("count").get<std::int64_t>());
      auto p = make_statistics_from_counts(std::move(entries));
      if (p.population != population) throw InvalidArgument("statistics: counts do not sum to the population");
      return p;
    }
    std::vector<std::pair<AgentType, double>> entries;
    for (const auto& t : types) entries.emplace_back(agent_type_from_json(t), t.at("mass").get<double>());
    auto p = make_statistics(std::move(entries));
    p.population = population;
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed statistics document: ") + e.what());
  }
}

Json to_json(const StatIntervention& xi) {
  Json out = Json::array();
  for (std::size_t w = 0; w < xi.types.size(); ++w) {
    for (std::size_t eta = 0; eta < xi.xi[w].size(); ++eta) {
      if (xi.xi[w][eta] == 0.0) continue;
      auto rec = to_json(xi.types[w]);
      rec["eta"] = eta;
      rec["mass"] = xi.xi[w][eta];
      out.push_back(std::move(rec));
    }
  }
  return out;
}

StatIntervention intervention_from_json(const Json& j, const Statistics& p0) {
  StatIntervention xi;
  xi.types = p0.types;
  xi.xi.resize(p0.size());
  for (std::size_t w = 0; w < p0.size(); ++w) xi.xi[w].assign(static_cast<std::size_t>(p0.types[w].r) + 1, 0.0);
  try {
    for (const auto& rec : j) {
      const auto w = agent_type_from_json(rec);
      const auto idx = p0.find(w);
      if (!idx) throw InfeasibleIntervention("intervention refers to a type absent from the statistics");
      const auto eta = rec.at("eta").get<std::int32_t>();
      if (eta < 0 || eta > w.r) throw InfeasibleIntervention("intervention reduction out of range");
      xi.xi[*idx][static_cast<std::size_t>(eta)] += rec.at("mass").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed intervention document: ") + e.what());
  }
  xi.validate_against(p0);
  return xi;
}

Json to_json(const MarginReport& m) {
  return Json{{"margin", m.margin}, {"argmin", m.argmin}, {"upper", m.upper}, {"points", m.points}};
}

Json to_json(const MomentSummary& m) {
  return Json{{"d", m.d}, {"k", m.k}, {"d2", m.d2}, {"k2", m.k2}, {"dk", m.dk}, {"nu", m.nu}};
}

Json to_json(const PlannerConfig& cfg) {
  Json out;
  out["eps"] = cfg.eps;
  out["grid_n"] = cfg.grid_n;
  out["delta"] = cfg.delta ? Json(*cfg.delta) : Json("auto");
  out["fine_m"] = cfg.audit_points();
  out["exclude_right_endpoint"] = cfg.exclude_right_endpoint;
  out["full_reduction_only"] = cfg.full_reduction_only;
  out["lp"] = Json{{"feasibility_tol", cfg.lp.feasibility_tol},
                   {"optimality_tol", cfg.lp.optimality_tol},
                   {"gap_tol", cfg.lp.gap_tol},
                   {"pivot_tol", cfg.lp.pivot_tol}};
  return out;
}

namespace {

// Non-finite values (delta_N overflows for large degrees) are spelled out
// instead of becoming JSON null.
Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

Json to_json(const PlanResult& r) {
  Json out;
  out["alpha_eps"] = r.alpha;
  out["delta_used"] = r.delta_used;
  out["delta_N"] = number(r.delta_n);
  out["regime"] = r.guarantee_regime ? "guarantee (delta >= delta_N)" : "empirical (delta < delta_N)";
  out["feasible"] = r.feasible;
  out["cost"] = r.cost;
  out["xi"] = to_json(r.xi);
  Json audit;
  audit["grid_margin"] = r.grid_margin;
  audit["lp_max_violation"] = r.lp_violation;
  audit["relaxed_margin"] = r.relaxed.decomposed.margin;
  audit["relaxed_margin_direct"] = r.relaxed.direct.margin;
  audit["decomposition_discrepancy"] = r.relaxed.discrepancy;
  audit["relaxed"] = to_json(r.relaxed.decomposed);
  audit["original_margin"] = r.original.margin;
  audit["zmax"] = r.original.upper;
  audit["original"] = to_json(r.original);
  out["audit"] = std::move(audit);
  out["lp"] = Json{{"status", to_string(r.lp.status)},
                   {"iterations", r.lp.iterations},
                   {"gap", r.lp.gap},
                   {"objective", r.lp.objective},
                   {"dual_objective", r.lp.dual_objective},
                   {"max_violation", r.lp.max_violation},
                   {"solved_via_dual", r.lp.solved_via_dual},
                   {"variables", r.variables},
                   {"grid_rows", r.grid_rows},
                   {"budget_rows", r.budget_rows},
                   {"pruned_columns", r.pruned},
                   {"message", r.lp.message}};
  out["moments"] = Json{{"before", to_json(r.moments_before)}, {"after", to_json(r.moments_after)}};
  if (!r.feasible) {
    out["binding_points"] = r.binding_points;
    out["message"] = r.message;
  }
  return out;
}

Json to_json(const RoundedIntervention& r) {
  Json out = Json::array();
  for (std::size_t w = 0; w < r.types.size(); ++w) {
    for (std::size_t eta = 1; eta < r.counts[w].size(); ++eta) {
      if (r.counts[w][eta] == 0) continue;
      auto rec = to_json(r.types[w]);
      rec["eta"] = eta;
      rec["count"] = r.counts[w][eta];
      out.push_back(std::move(rec));
    }
  }
  return out;
}

Json to_json(const McReport& r) {
  Json out;
  out["n"] = r.options.n;
  out["replicates"] = r.options.replicates;
  out["eps"] = r.options.eps;
  out["seed"] = r.options.seed;
  out["realized_cost"] = r.realized_cost;
  out["success_rate"] = r.success_rate;
  out["mean_final_active"] = r.mean_final;
  out["stddev_final_active"] = r.stddev_final;
  out["max_sup_dev_y"] = r.max_sup_dev_y;
  out["max_sup_dev_z"] = r.max_sup_dev_z;
  out["recursion_final_y"] = r.recursion.y.back();
  out["recursion_converged"] = r.recursion.converged;
  out["nu"] = r.acceptance.nu;
  out["acceptance_undirected_law"] = r.acceptance.undirected_law;
  out["acceptance_directed_law"] = r.acceptance.directed_law;
  out["acceptance_observed"] = r.observed_acceptance;
  Json runs = Json::array();
  for (const auto& run : r.runs) {
    runs.push_back(Json{{"seed", run.seed},
                        {"attempts", run.attempts},
                        {"steps", run.y.size() - 1},
                        {"final_active", run.final_active},
                        {"success", run.success},
                        {"sup_dev_y", run.sup_dev_y},
                        {"sup_dev_z", run.sup_dev_z}});
  }
  out["runs"] = std::move(runs);
  out["rounded_intervention"] = to_json(r.rounded);
  return out;
}

Json to_json(const RealizationReport& r) {
  Json out;
  out["n"] = r.rounded.n;
  out["realized_cost"] = r.realized_cost;
  std::int64_t touched = 0;
  for (auto h : r.h.values) touched += h > 0 ? 1 : 0;
  out["intervened_nodes"] = touched;
  out["steps"] = r.y.size() - 1;
  out["final_active"] = r.final_active;
  out["success"] = r.success;
  out["recursion_final_y"] = r.recursion.y.back();
  out["sup_dev_y"] = sup_deviation(r.y, r.recursion.y);
  out["sup_dev_z"] = sup_deviation(r.z, r.recursion.z);
  out["rounded_intervention"] = to_json(r.rounded);
  return out;
}

Json read_json_file(const std::string& path) {
  auto in = open_input(path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path, 0, e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << j.dump(2) << '\n';
}

void write_curve_csv(std::ostream& os, const std::vector<CurveRow>& rows) {
  os << "z,psi,phi,phi_minus_z\n";
  for (const auto& r : rows) os << fmt(r.z) << ',' << fmt(r.psi) << ',' << fmt(r.phi) << ',' << fmt(r.phi - r.z) << '\n';
}

void write_trajectory_csv(std::ostream& os, std::span<const double> y, std::span<const double> z,
                          const RecursionPath& rec) {
  os << "t,Y,Z,y_recursion,z_recursion\n";
  const std::size_t len = std::max({y.size(), z.size(), rec.y.size()});
  auto at = [](auto&& v, std::size_t t) { return v.empty() ? 0.0 : v[std::min(t, v.size() - 1)]; };
  for (std::size_t t = 0; t < len; ++t) {
    os << t << ',' << fmt(at(y, t)) << ',' << fmt(at(z, t)) << ',' << fmt(at(rec.y, t)) << ','
       << fmt(at(rec.z, t)) << '\n';
  }
}

}  // namespace ltmopt
