#pragma once

// Stages behind the command line: stats -> plan -> validate, and the
// experiment loop over threshold instances. Every document written embeds
// the resolved configuration.

#include <cstdint>
#include <string>

#include "ltmopt/error.hpp"
#include "ltmopt/io.hpp"

namespace ltmopt {

struct RunConfig {
  std::string preset;
  std::string edges;
  bool undirected = false;
  bool drop_self_loops = false;
  std::string threshold_rule = "half-out-degree";
  bool clamp_thresholds = false;
  std::string cost_rule = "linear";
  PlannerConfig planner;
  std::int64_t mc_n = 0;  // 0: population of the statistics
  std::size_t replicates = 0;
  std::size_t instances = 1;
  bool compare_seeding = false;
  bool realize = true;  // validate on the network itself when edges are given
  std::uint64_t seed = 1;
  std::string out = ".";
  bool dump_lp = false;

  // Seed of the threshold draw of instance i (uniform-random rule).
  std::uint64_t threshold_seed(std::size_t instance) const;
};

Json to_json(const RunConfig& cfg);

// epinions, powergrid or synthetic; overwrites the model parameters only.
void apply_preset(RunConfig& cfg, const std::string& name);

// Exit codes of the command line tool.
namespace exit_code {
constexpr int ok = 0;
constexpr int unexpected = 1;
constexpr int usage = 2;
constexpr int stats = 3;
constexpr int plan = 4;
constexpr int validate = 5;
}  // namespace exit_code

class StageError : public Error {
 public:
  StageError(std::string stage, int code, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)), code_(code) {}
  const std::string& stage() const { return stage_; }
  int code() const { return code_; }

 private:
  std::string stage_;
  int code_;
};

struct NetworkStats {
  LoadedNetwork net;
  ThresholdResult thresholds;
  ExtractedStatistics extracted;
  std::uint64_t threshold_seed = 0;
};

NetworkStats compute_stats(const RunConfig& cfg, std::size_t instance = 0);

// n, |E|, degree extremes, moments, nu and the well-posedness checks.
Json statistics_summary(const Statistics& p, std::size_t edges);

// Each stage writes into `dir` and returns its document; failures are
// rethrown as StageError with the stage's exit code.
Json stats_stage(const RunConfig& cfg, const std::string& dir, NetworkStats* keep = nullptr,
                 std::size_t instance = 0);
Json plan_stage(const RunConfig& cfg, const Statistics& p0, const std::string& dir, PlanResult* keep = nullptr);
// Realizes on `network` when given, and runs cfg.replicates Monte Carlo
// replicates on sampled networks.
Json validate_stage(const RunConfig& cfg, const Json& plan_doc, const NetworkStats* network,
                    const std::string& dir);
Json experiment(const RunConfig& cfg);

}  // namespace ltmopt
