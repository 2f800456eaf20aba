// ltmopt: statistics, planning and validation of threshold-reduction
// interventions from the command line.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include "ltmopt/pipeline.hpp"

using namespace ltmopt;

namespace {

struct Flags {
  RunConfig cfg;
  std::string delta = "0.05";
  std::size_t fine_m = 0;
  std::string stats_path;
  std::string plan_path;
  std::map<std::string, CLI::Option*> given;
};

void network_flags(CLI::App& app, Flags& f) {
  f.given["edges"] = app.add_option("--edges", f.cfg.edges, "edge list, one \"tail head\" pair per line")
                         ->envname("LTMOPT_EDGES");
  f.given["undirected"] = app.add_flag("--undirected", f.cfg.undirected, "read each line as two directed edges")
                              ->envname("LTMOPT_UNDIRECTED");
  app.add_flag("--drop-self-loops", f.cfg.drop_self_loops, "skip self-loop lines instead of failing");
  f.given["threshold-rule"] =
      app.add_option("--threshold-rule", f.cfg.threshold_rule, "half-out-degree | uniform-random | file:PATH")
          ->envname("LTMOPT_THRESHOLD_RULE");
  app.add_flag("--clamp-thresholds", f.cfg.clamp_thresholds, "lower file thresholds above the out-degree");
  f.given["cost-rule"] = app.add_option("--cost-rule", f.cfg.cost_rule, "linear | seeding | unit-seeding | file:PATH")
                             ->envname("LTMOPT_COST_RULE");
}

void planner_flags(CLI::App& app, Flags& f) {
  f.given["eps"] = app.add_option("--eps", f.cfg.planner.eps, "tolerated inactive fraction, in (0, 1]")
                       ->envname("LTMOPT_EPS");
  f.given["grid-n"] = app.add_option("--grid-n", f.cfg.planner.grid_n, "grid intervals N")->envname("LTMOPT_GRID_N");
  f.given["delta"] = app.add_option("--delta", f.delta, "grid margin: a positive number, or auto for delta_N")
                         ->envname("LTMOPT_DELTA");
  app.add_option("--fine-m", f.fine_m, "audit grid intervals (default 10 N)")->envname("LTMOPT_FINE_M");
  app.add_flag("--exclude-right-endpoint", f.cfg.planner.exclude_right_endpoint,
               "allow in-degree 0 agents by leaving z = 1 - alpha out of the constraint");
  app.add_flag("--full-reduction-only", f.cfg.planner.full_reduction_only,
               "only allow lowering a threshold to 0 (seeding)");
  app.add_flag("--dump-lp", f.cfg.dump_lp, "also write the LP as model.lp");
}

void run_flags(CLI::App& app, Flags& f) {
  app.add_option("--mc-n", f.cfg.mc_n, "agents per sampled network (default: population)")->envname("LTMOPT_MC_N");
  f.given["replicates"] = app.add_option("--replicates", f.cfg.replicates, "sampled networks to simulate")
                              ->envname("LTMOPT_REPLICATES");
  app.add_option("--seed", f.cfg.seed, "master seed")->envname("LTMOPT_SEED");
  app.add_option("--out", f.cfg.out, "output directory")->envname("LTMOPT_OUT");
  app.add_option("--jobs", f.cfg.planner.jobs, "worker threads (0: all cores)")->envname("LTMOPT_JOBS");
}

void resolve(Flags& f) {
  if (f.delta == "auto") {
    f.cfg.planner.delta.reset();
  } else {
    try {
      std::size_t used = 0;
      f.cfg.planner.delta = std::stod(f.delta, &used);
      if (used != f.delta.size()) throw std::invalid_argument(f.delta);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--delta", "expected auto or a number, got " + f.delta);
    }
  }
  f.cfg.planner.fine_m = f.fine_m;
}

// Preset values fill in whatever was not given on the command line or in the environment.
void apply_preset_defaults(Flags& f, const std::string& name) {
  RunConfig preset = f.cfg;
  apply_preset(preset, name);
  auto unset = [&](const char* key) { return f.given.count(key) && f.given[key]->count() == 0; };
  f.cfg.preset = name;
  if (unset("undirected")) f.cfg.undirected = preset.undirected;
  if (unset("threshold-rule")) f.cfg.threshold_rule = preset.threshold_rule;
  if (unset("cost-rule")) f.cfg.cost_rule = preset.cost_rule;
  if (unset("eps")) f.cfg.planner.eps = preset.planner.eps;
  if (unset("grid-n")) f.cfg.planner.grid_n = preset.planner.grid_n;
  if (unset("delta")) f.cfg.planner.delta = preset.planner.delta;
  if (unset("instances")) f.cfg.instances = preset.instances;
  if (unset("compare-seeding")) f.cfg.compare_seeding = preset.compare_seeding;
}

void print_json(const Json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Least-cost threshold interventions from network statistics"};
  app.require_subcommand(1);
  Flags f;

  auto* stats = app.add_subcommand("stats", "extract type statistics from an edge list");
  network_flags(*stats, f);
  stats->add_option("--seed", f.cfg.seed, "master seed")->envname("LTMOPT_SEED");
  stats->add_option("--out", f.cfg.out, "output directory")->envname("LTMOPT_OUT");

  auto* plan_cmd = app.add_subcommand("plan", "solve the planning LP and audit its solution");
  network_flags(*plan_cmd, f);
  planner_flags(*plan_cmd, f);
  plan_cmd->add_option("--stats", f.stats_path, "statistics.json instead of an edge list");
  plan_cmd->add_option("--seed", f.cfg.seed, "master seed")->envname("LTMOPT_SEED");
  plan_cmd->add_option("--out", f.cfg.out, "output directory")->envname("LTMOPT_OUT");
  plan_cmd->add_option("--jobs", f.cfg.planner.jobs, "worker threads (0: all cores)")->envname("LTMOPT_JOBS");

  auto* validate = app.add_subcommand("validate", "simulate a plan on the network and on sampled networks");
  network_flags(*validate, f);
  validate->add_option("--plan", f.plan_path, "plan.json")->required();
  run_flags(*validate, f);

  auto* exp = app.add_subcommand("experiment", "stats, plan and validate over threshold instances");
  network_flags(*exp, f);
  planner_flags(*exp, f);
  run_flags(*exp, f);
  exp->add_option("--preset", f.cfg.preset, "epinions | powergrid | synthetic");
  f.given["instances"] = exp->add_option("--instances", f.cfg.instances, "threshold instances");
  f.given["compare-seeding"] = exp->add_flag("--compare-seeding", f.cfg.compare_seeding,
                                             "also solve and realize the seeding LP");
  exp->add_flag("!--no-realize", f.cfg.realize, "skip simulating on the input network");

  try {
    app.parse(argc, argv);
    resolve(f);
    if (exp->parsed() && !f.cfg.preset.empty()) apply_preset_defaults(f, f.cfg.preset);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? exit_code::ok : exit_code::usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::usage;
  }

  try {
    if (stats->parsed()) {
      NetworkStats ns;
      const auto doc = stats_stage(f.cfg, f.cfg.out, &ns);
      if (ns.net.dropped_self_loops) {
        std::cerr << "warning: dropped " << ns.net.dropped_self_loops << " self-loop lines\n";
      }
      print_json(doc.at("summary"));
    } else if (plan_cmd->parsed()) {
      Statistics p0;
      if (!f.stats_path.empty()) {
        p0 = [&] {
          try {
            return statistics_from_json(read_json_file(f.stats_path).at("statistics"));
          } catch (const std::exception& e) {
            throw StageError("plan", exit_code::plan, e.what());
          }
        }();
      } else {
        NetworkStats ns;
        stats_stage(f.cfg, f.cfg.out, &ns);
        p0 = ns.extracted.stats;
      }
      const auto doc = plan_stage(f.cfg, p0, f.cfg.out);
      print_json(Json{{"cost", doc.at("cost")}, {"regime", doc.at("regime")}, {"audit", doc.at("audit")}});
    } else if (validate->parsed()) {
      Json plan_doc;
      try {
        plan_doc = read_json_file(f.plan_path);
      } catch (const std::exception& e) {
        throw StageError("validate", exit_code::validate, e.what());
      }
      NetworkStats ns;
      const bool on_network = !f.cfg.edges.empty();
      if (on_network) stats_stage(f.cfg, f.cfg.out, &ns);
      auto doc = validate_stage(f.cfg, plan_doc, on_network ? &ns : nullptr, f.cfg.out);
      doc.erase("config");
      if (doc["monte_carlo"].contains("runs")) doc["monte_carlo"].erase("runs");
      print_json(doc);
    } else if (exp->parsed()) {
      auto doc = experiment(f.cfg);
      doc.erase("config");
      print_json(doc);
    }
  } catch (const StageError& e) {
    std::cerr << "error in " << e.what() << '\n';
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::unexpected;
  }
  return exit_code::ok;
}
