#include "ltmopt/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ltmopt/meanfield.hpp"
#include "ltmopt/rng.hpp"

namespace ltmopt {

namespace fs = std::filesystem;

std::uint64_t RunConfig::threshold_seed(std::size_t instance) const {
  return derive_seed(seed, 0x7468726573ULL + instance);
}

Json to_json(const RunConfig& cfg) {
  Json out;
  out["preset"] = cfg.preset;
  out["edges"] = cfg.edges;
  out["undirected"] = cfg.undirected;
  out["drop_self_loops"] = cfg.drop_self_loops;
  out["threshold_rule"] = cfg.threshold_rule;
  out["clamp_thresholds"] = cfg.clamp_thresholds;
  out["cost_rule"] = cfg.cost_rule;
  out["planner"] = to_json(cfg.planner);
  out["mc_n"] = cfg.mc_n;
  out["replicates"] = cfg.replicates;
  out["instances"] = cfg.instances;
  out["compare_seeding"] = cfg.compare_seeding;
  out["realize"] = cfg.realize;
  out["seed"] = cfg.seed;
  out["jobs"] = cfg.planner.jobs;
  return out;
}

void apply_preset(RunConfig& cfg, const std::string& name) {
  cfg.preset = name;
  cfg.planner.grid_n = 100;
  cfg.planner.delta = 0.05;
  cfg.cost_rule = "linear";
  cfg.undirected = true;
  if (name == "epinions") {
    cfg.threshold_rule = "half-out-degree";
    cfg.planner.eps = 0.1;
    cfg.instances = 1;
    cfg.compare_seeding = true;
  } else if (name == "powergrid") {
    cfg.threshold_rule = "uniform-random";
    cfg.planner.eps = 0.3;
    cfg.instances = 10;
    cfg.compare_seeding = false;
  } else if (name == "synthetic") {
    cfg.threshold_rule = "half-out-degree";
    cfg.planner.eps = 0.1;
    cfg.instances = 1;
    cfg.compare_seeding = true;
  } else {
    throw InvalidArgument("unknown preset '" + name + "' (expected epinions, powergrid or synthetic)");
  }
}

NetworkStats compute_stats(const RunConfig& cfg, std::size_t instance) {
  if (cfg.edges.empty()) throw InvalidArgument("an edge list is required (--edges)");
  NetworkStats s;
  s.net = load_edge_list(cfg.edges, {cfg.undirected, cfg.drop_self_loops});
  s.threshold_seed = cfg.threshold_seed(instance);
  s.thresholds = make_thresholds(s.net, parse_threshold_rule(cfg.threshold_rule), s.threshold_seed,
                                 cfg.clamp_thresholds);
  s.extracted = extract_statistics(s.net.graph, s.thresholds.rho, parse_cost_rule(cfg.cost_rule));
  return s;
}

Json statistics_summary(const Statistics& p, std::size_t edges) {
  Json out;
  out["n"] = p.population;
  out["edges"] = edges;
  out["types"] = p.size();
  const auto deg = degree_summary(p);
  out["d_min"] = deg.d_min;
  out["d_max"] = deg.d_max;
  out["k_max"] = deg.k_max;
  out["moments"] = to_json(moment_summary(p));
  if (p.population > 0) {
    const auto wp = check_well_posed(p.population, p);
    out["well_posed"] = Json{{"integral", wp.integral}, {"balanced", wp.balanced}, {"no_self_loop", wp.no_self_loop}};
  }
  return out;
}

namespace {

template <class Fn>
auto staged(const char* stage, int code, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, code, e.what());
  }
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InvalidArgument("cannot create " + dir + ": " + ec.message());
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  return out;
}

// Same agents, cost tables replaced by those of another rule.
Statistics with_costs(const Statistics& p, const CostRule& rule) {
  if (!p.counts.empty()) {
    std::vector<std::pair<AgentType, std::int64_t>> entries;
    for (std::size_t w = 0; w < p.size(); ++w) {
      auto t = p.types[w];
      t.cost = rule(t.d, t.k, t.r);
      entries.emplace_back(std::move(t), p.counts[w]);
    }
    return make_statistics_from_counts(std::move(entries));
  }
  std::vector<std::pair<AgentType, double>> entries;
  for (std::size_t w = 0; w < p.size(); ++w) {
    auto t = p.types[w];
    t.cost = rule(t.d, t.k, t.r);
    entries.emplace_back(std::move(t), p.mass[w]);
  }
  auto out = make_statistics(std::move(entries));
  out.population = p.population;
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

Json stats_stage(const RunConfig& cfg, const std::string& dir, NetworkStats* keep, std::size_t instance) {
  return staged("stats", exit_code::stats, [&] {
    ensure_dir(dir);
    auto s = compute_stats(cfg, instance);
    Json doc;
    doc["config"] = to_json(cfg);
    doc["threshold_seed"] = s.threshold_seed;
    doc["dropped_self_loops"] = s.net.dropped_self_loops;
    doc["clamped_thresholds"] = s.thresholds.clamped;
    doc["summary"] = statistics_summary(s.extracted.stats, s.net.graph.edge_count());
    doc["statistics"] = to_json(s.extracted.stats);
    write_json_file((fs::path(dir) / "statistics.json").string(), doc);
    auto ids = open_output(fs::path(dir) / "idmap.csv");
    write_id_map(s.net, ids);
    if (keep) *keep = std::move(s);
    return doc;
  });
}

Json plan_stage(const RunConfig& cfg, const Statistics& p0, const std::string& dir, PlanResult* keep) {
  return staged("plan", exit_code::plan, [&] {
    ensure_dir(dir);
    auto result = plan(p0, cfg.planner);
    Json doc;
    doc["config"] = to_json(cfg);
    doc.update(to_json(result));
    doc["statistics"] = to_json(p0);
    write_json_file((fs::path(dir) / "plan.json").string(), doc);
    if (cfg.dump_lp) {
      auto lp_out = open_output(fs::path(dir) / "model.lp");
      write_lp_format(build_lp(p0, cfg.planner).model, lp_out);
    }
    const std::size_t resolution = cfg.planner.audit_points();
    auto c0 = open_output(fs::path(dir) / "curve_p0.csv");
    write_curve_csv(c0, curve_table(p0, resolution));
    if (!result.feasible) {
      std::string where;
      for (std::size_t i = 0; i < result.binding_points.size() && i < 5; ++i) {
        where += (i ? ", " : " at z = ") + std::to_string(result.binding_points[i]);
      }
      throw StageError("plan", exit_code::plan, result.message + where + " (details in plan.json)");
    }
    auto c1 = open_output(fs::path(dir) / "curve_plan.csv");
    write_curve_csv(c1, curve_table(post_statistics(p0, result.xi, true), resolution));
    if (keep) *keep = std::move(result);
    return doc;
  });
}

Json validate_stage(const RunConfig& cfg, const Json& plan_doc, const NetworkStats* network,
                    const std::string& dir) {
  return staged("validate", exit_code::validate, [&] {
    ensure_dir(dir);
    if (!plan_doc.contains("statistics") || !plan_doc.contains("xi")) {
      throw InvalidArgument("plan document lacks statistics or xi");
    }
    const auto p0 = statistics_from_json(plan_doc.at("statistics"));
    const auto xi = intervention_from_json(plan_doc.at("xi"), p0);
    Json doc;
    doc["config"] = to_json(cfg);
    doc["plan_cost"] = intervention_cost(xi);
    if (network) {
      const auto xi_net = intervention_from_json(plan_doc.at("xi"), network->extracted.stats);
      const auto rep = realize_on_network(network->net.graph, network->thresholds.rho, network->extracted,
                                          xi_net, cfg.planner.eps, derive_seed(cfg.seed, 0x6e6574ULL));
      doc["network"] = to_json(rep);
      auto csv = open_output(fs::path(dir) / "trajectory_network.csv");
      write_trajectory_csv(csv, rep.y, rep.z, rep.recursion);
    }
    McOptions mc;
    mc.n = cfg.mc_n ? cfg.mc_n : p0.population;
    mc.replicates = cfg.replicates;
    mc.eps = cfg.planner.eps;
    mc.seed = derive_seed(cfg.seed, 0x6d63ULL);
    mc.jobs = cfg.planner.jobs;
    if (mc.replicates > 0) {
      if (mc.n < 1) throw InvalidArgument("Monte Carlo needs a population size (--mc-n)");
      const auto rep = monte_carlo_validate(p0, xi, mc);
      doc["monte_carlo"] = to_json(rep);
      for (std::size_t r = 0; r < rep.runs.size(); ++r) {
        auto csv = open_output(fs::path(dir) / ("trajectory_mc_" + std::to_string(r) + ".csv"));
        write_trajectory_csv(csv, rep.runs[r].y, rep.runs[r].z, rep.recursion);
      }
    } else {
      doc["monte_carlo"] = Json{{"replicates", 0}, {"runs", Json::array()}};
    }
    write_json_file((fs::path(dir) / "validate.json").string(), doc);
    return doc;
  });
}

Json experiment(const RunConfig& cfg) {
  if (cfg.instances == 0) throw InvalidArgument("experiment needs at least one instance");
  Json summary;
  summary["config"] = to_json(cfg);
  Json rows = Json::array();
  std::vector<double> costs;
  std::vector<double> finals;
  std::vector<double> seeding_costs;
  for (std::size_t i = 0; i < cfg.instances; ++i) {
    const std::string dir =
        cfg.instances > 1 ? (fs::path(cfg.out) / ("instance_" + std::to_string(i))).string() : cfg.out;
    NetworkStats ns;
    stats_stage(cfg, dir, &ns, i);
    PlanResult result;
    const auto plan_doc = plan_stage(cfg, ns.extracted.stats, dir, &result);
    const auto val = validate_stage(cfg, plan_doc, cfg.realize ? &ns : nullptr, dir);
    Json row;
    row["instance"] = i;
    row["threshold_seed"] = ns.threshold_seed;
    row["cost"] = result.cost;
    row["regime"] = plan_doc.at("regime");
    costs.push_back(result.cost);
    if (val.contains("network")) {
      row["final_active"] = val["network"]["final_active"];
      row["realized_cost"] = val["network"]["realized_cost"];
      row["success"] = val["network"]["success"];
      finals.push_back(val["network"]["final_active"].get<double>());
    }
    if (cfg.compare_seeding) {
      // The same LP with seeding costs c(eta) = r for eta > 0.
      RunConfig seeding = cfg;
      seeding.cost_rule = "seeding";
      const auto p_seed = with_costs(ns.extracted.stats, cost_rules::seeding());
      const std::string sdir = (fs::path(dir) / "seeding").string();
      PlanResult sres;
      const auto sdoc = plan_stage(seeding, p_seed, sdir, &sres);
      row["seeding_cost"] = sres.cost;
      seeding_costs.push_back(sres.cost);
      if (cfg.realize) {
        NetworkStats sns = ns;
        sns.extracted = extract_statistics(ns.net.graph, ns.thresholds.rho, cost_rules::seeding());
        const auto sval = validate_stage(seeding, sdoc, &sns, sdir);
        row["seeding_final_active"] = sval["network"]["final_active"];
      }
    }
    rows.push_back(std::move(row));
  }
  summary["instances"] = std::move(rows);
  summary["cost_mean"] = mean_of(costs);
  summary["cost_stddev"] = stddev_of(costs);
  if (!finals.empty()) {
    summary["final_active_mean"] = mean_of(finals);
    summary["final_active_stddev"] = stddev_of(finals);
  }
  if (!seeding_costs.empty()) {
    summary["seeding_cost_mean"] = mean_of(seeding_costs);
    summary["seeding_cost_stddev"] = stddev_of(seeding_costs);
  }
  ensure_dir(cfg.out);
  write_json_file((fs::path(cfg.out) / "experiment.json").string(), summary);
  return summary;
}

}  // namespace ltmopt
