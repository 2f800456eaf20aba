#pragma once

// Configuration-model sampling conditioned on no self-loops, integer
// rounding of statistical interventions, and Monte Carlo comparison of the
// threshold dynamics against the mean-field recursion.

#include <cstdint>
#include <optional>
#include <vector>

#include "ltmopt/graph.hpp"
#include "ltmopt/meanfield.hpp"
#include "ltmopt/rng.hpp"
#include "ltmopt/typestats.hpp"

namespace ltmopt {

// counts[w][eta] agents of xi.types[w] get their threshold lowered by eta.
struct RoundedIntervention {
  std::vector<AgentType> types;
  std::vector<std::vector<std::int64_t>> counts;
  std::int64_t n = 0;

  std::int64_t total(std::size_t w) const;
  // sum_w sum_eta counts c_w(eta)
  double cost() const;
};

// Largest-remainder apportionment: first of n over types by their xi row
// sums (ties by type index), then of each type total over eta (exact ties in
// a seeded random order). Values within 1e-9 of an integer count as integers.
RoundedIntervention round_intervention(const StatIntervention& xi, std::int64_t n, std::uint64_t seed);

// Largest-remainder counts n p_w summing to n, ties by type index.
std::vector<std::int64_t> round_statistics(const Statistics& p, std::int64_t n);

// Uniform wiring of half-edges: node i contributes out_degree[i] tails and
// in_degree[i] heads; a uniformly random bijection pairs them. Draws are
// rejected as a whole when they create a self-loop.
class WiringSampler {
 public:
  // Throws InvalidArgument if degree sums differ or a degree is negative.
  WiringSampler(std::vector<std::int32_t> out_degree, std::vector<std::int32_t> in_degree);

  // One permutation draw; nullopt if it creates a self-loop.
  std::optional<std::vector<Edge>> draw(Rng& rng);

  struct Result {
    MultiGraph graph;
    std::size_t attempts = 0;
  };
  // Throws SamplingError after max_attempts rejected draws.
  Result sample(Rng& rng, std::size_t max_attempts = 1000);

  NodeId node_count() const { return static_cast<NodeId>(out_degree_.size()); }
  // Expected self-loops of one draw: sum_i kappa_i delta_i / |E|.
  double expected_self_loops() const;

 private:
  std::vector<std::int32_t> out_degree_;
  std::vector<std::int32_t> in_degree_;
  std::vector<NodeId> tails_;
  std::vector<NodeId> heads_;
};

struct TypeAssignment {
  std::vector<AgentType> types;
  std::vector<std::int32_t> type_of_node;  // index into types
  std::vector<std::int64_t> counts;
};

struct SampledNetwork {
  MultiGraph graph;
  ThresholdVector rho;
  TypeAssignment assignment;
  std::size_t attempts = 0;
};

// Nodes 0..n-1 receive types in type order with round_statistics counts,
// thresholds r_w. Throws InvalidArgument if the rounded degree sums differ,
// SamplingError when the retry budget runs out.
SampledNetwork sample_configuration_model(const Statistics& p, std::int64_t n, Rng& rng,
                                          std::size_t max_attempts = 1000);

// Lowers the thresholds of counts[w][eta] uniformly chosen agents of each
// type w by eta. assignment.types must equal rounded.types.
InterventionVector realize_intervention(const TypeAssignment& assignment, const ThresholdVector& rho,
                                        const RoundedIntervention& rounded, Rng& rng);

// Acceptance probability of the no-self-loop conditioning: e^{-nu/2} (the
// asymptotic law for undirected stub matching) and e^{-<dk>/<d>} (the Poisson
// limit of self-loops for directed permutation wiring).
struct AcceptanceEstimate {
  double nu = 0.0;
  double undirected_law = 0.0;
  double directed_law = 0.0;
};
AcceptanceEstimate acceptance_estimate(const Statistics& p);

struct McOptions {
  std::int64_t n = 100000;
  std::size_t replicates = 20;
  double eps = 0.1;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::size_t max_attempts = 1000;
  std::size_t t_max = 0;  // 0: n steps (stopping at the fixed point)
};

struct ReplicateResult {
  std::uint64_t seed = 0;
  std::size_t attempts = 0;
  std::vector<double> y;  // Y(t)
  std::vector<double> z;  // Z(t)
  std::optional<std::size_t> fixed_point;
  double final_active = 0.0;
  bool success = false;
  double sup_dev_y = 0.0;
  double sup_dev_z = 0.0;
};

struct McReport {
  McOptions options;
  RoundedIntervention rounded;
  double realized_cost = 0.0;  // rounded.cost() / n
  RecursionPath recursion;
  std::vector<ReplicateResult> runs;
  double success_rate = 0.0;
  double mean_final = 0.0;
  double stddev_final = 0.0;
  double max_sup_dev_y = 0.0;
  double max_sup_dev_z = 0.0;
  AcceptanceEstimate acceptance;
  double observed_acceptance = 0.0;  // replicates / total draws
};

// sup_t |a(t) - b(t)|, the shorter sequence held at its last value.
double sup_deviation(std::span<const double> a, std::span<const double> b);

// Per replicate (stream derive_seed(seed, r)): sample C_{n, p(xi)} with the
// rounded intervention applied, run the dynamics from all zeros and compare
// with the recursion on the rounded post statistics.
McReport monte_carlo_validate(const Statistics& p0, const StatIntervention& xi, const McOptions& opt);

// Realize-on-network mode: the types are those of the network itself.
struct RealizationReport {
  RoundedIntervention rounded;
  InterventionVector h;
  double realized_cost = 0.0;  // sum_i gamma_i(h_i) / n
  std::vector<double> y;
  std::vector<double> z;
  RecursionPath recursion;
  std::optional<std::size_t> fixed_point;
  double final_active = 0.0;
  bool success = false;
};

RealizationReport realize_on_network(const MultiGraph& g, const ThresholdVector& rho,
                                     const ExtractedStatistics& extracted, const StatIntervention& xi,
                                     double eps, std::uint64_t seed);

}  // namespace ltmopt
