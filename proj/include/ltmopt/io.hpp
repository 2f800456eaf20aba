#pragma once

// File formats: edge lists, threshold and cost rules, JSON documents and CSV tables.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ltmopt/graph.hpp"
#include "ltmopt/planner.hpp"
#include "ltmopt/sampler.hpp"
#include "ltmopt/typestats.hpp"

namespace ltmopt {

using Json = nlohmann::ordered_json;

struct EdgeListOptions {
  bool undirected = false;       // each line yields (u, v) and (v, u)
  bool drop_self_loops = false;  // otherwise a self-loop is a ParseError
};

struct LoadedNetwork {
  MultiGraph graph;
  std::vector<std::string> labels;  // node id -> token in the file
  std::size_t dropped_self_loops = 0;
};

// "tail head" per line, whitespace separated, further columns ignored; lines
// starting with '#' or '%' and blank lines skipped. Node ids are arbitrary
// tokens, numbered in order of first appearance.
LoadedNetwork read_edge_list(std::istream& in, const std::string& source, const EdgeListOptions& opt = {});
LoadedNetwork load_edge_list(const std::string& path, const EdgeListOptions& opt = {});

void write_id_map(const LoadedNetwork& net, std::ostream& os);

struct ThresholdRule {
  enum class Kind { half_out_degree, uniform_random, file } kind = Kind::half_out_degree;
  std::string path;
  std::string text() const;
};
// "half-out-degree", "uniform-random" or "file:PATH".
ThresholdRule parse_threshold_rule(const std::string& text);

struct ThresholdResult {
  ThresholdVector rho;
  std::size_t clamped = 0;  // file thresholds above kappa_i lowered to kappa_i
};

// File rule: "label threshold" per line, every node listed. Thresholds above
// the out-degree are rejected unless clamp is set.
ThresholdResult make_thresholds(const LoadedNetwork& net, const ThresholdRule& rule, std::uint64_t seed,
                                bool clamp = false);

// "linear", "seeding", "unit-seeding" or "file:PATH" with lines "d k r c0 c1 .. cr".
CostRule parse_cost_rule(const std::string& text);

Json to_json(const AgentType& w);
AgentType agent_type_from_json(const Json& j);

Json to_json(const Statistics& p);
Statistics statistics_from_json(const Json& j);

// Records {d, k, r, cost, eta, mass} for every non-zero xi_w(eta).
Json to_json(const StatIntervention& xi);
// Aligned to p0; entries for types absent from p0 are an error.
StatIntervention intervention_from_json(const Json& j, const Statistics& p0);

Json to_json(const MarginReport& m);
Json to_json(const MomentSummary& m);
Json to_json(const PlannerConfig& cfg);
Json to_json(const PlanResult& r);
Json to_json(const RoundedIntervention& r);
Json to_json(const McReport& r);
Json to_json(const RealizationReport& r);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

// CSV: z, psi, phi, phi_minus_z.
void write_curve_csv(std::ostream& os, const std::vector<CurveRow>& rows);
// CSV: t, Y, Z, y_recursion, z_recursion; shorter columns held at their last value.
void write_trajectory_csv(std::ostream& os, std::span<const double> y, std::span<const double> z,
                          const RecursionPath& rec);

}  // namespace ltmopt
