#include "ltmopt/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "ltmopt/error.hpp"
#include "ltmopt/parallel.hpp"

namespace ltmopt {

namespace {

// Floors of v plus one unit for the largest remainders until the sum is
// `total`. Exact remainder ties go to the earlier entry of `priority`.
std::vector<std::int64_t> apportion(std::span<const double> v, std::int64_t total,
                                    std::span<const std::size_t> priority) {
  std::vector<std::int64_t> out(v.size());
  std::vector<double> rem(v.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 0.0) || !std::isfinite(v[i])) throw InvalidArgument("cannot round a negative or non-finite mass");
    const double nearest = std::round(v[i]);
    if (std::abs(v[i] - nearest) < 1e-9) {
      out[i] = static_cast<std::int64_t>(nearest);
      rem[i] = 0.0;
    } else {
      out[i] = static_cast<std::int64_t>(std::floor(v[i]));
      rem[i] = v[i] - static_cast<double>(out[i]);
    }
    assigned += out[i];
  }
  const std::int64_t missing = total - assigned;
  if (missing < 0 || missing > static_cast<std::int64_t>(v.size())) {
    throw InvalidArgument("masses do not add up to the population (" + std::to_string(assigned) +
                          " assigned of " + std::to_string(total) + ")");
  }
  std::vector<std::size_t> order(priority.begin(), priority.end());
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::int64_t j = 0; j < missing; ++j) ++out[order[static_cast<std::size_t>(j)]];
  return out;
}

std::vector<std::size_t> identity_order(std::size_t n) {
  std::vector<std::size_t> o(n);
  std::iota(o.begin(), o.end(), std::size_t{0});
  return o;
}

Statistics statistics_after(const RoundedIntervention& rounded) {
  std::vector<std::pair<AgentType, std::int64_t>> entries;
  for (std::size_t w = 0; w < rounded.types.size(); ++w) {
    for (std::size_t eta = 0; eta < rounded.counts[w].size(); ++eta) {
      if (rounded.counts[w][eta] > 0) {
        entries.emplace_back(reduced_type(rounded.types[w], static_cast<std::int32_t>(eta)),
                             rounded.counts[w][eta]);
      }
    }
  }
  return make_statistics_from_counts(std::move(entries));
}

}  // namespace

std::int64_t RoundedIntervention::total(std::size_t w) const {
  return std::accumulate(counts[w].begin(), counts[w].end(), std::int64_t{0});
}

double RoundedIntervention::cost() const {
  double c = 0.0;
  for (std::size_t w = 0; w < types.size(); ++w) {
    for (std::size_t eta = 1; eta < counts[w].size(); ++eta) {
      c += static_cast<double>(counts[w][eta]) * types[w].cost[eta];
    }
  }
  return c;
}

RoundedIntervention round_intervention(const StatIntervention& xi, std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("population size must be positive");
  RoundedIntervention out;
  out.types = xi.types;
  out.n = n;
  std::vector<double> type_mass(xi.types.size());
  for (std::size_t w = 0; w < xi.types.size(); ++w) {
    type_mass[w] = static_cast<double>(n) * std::accumulate(xi.xi[w].begin(), xi.xi[w].end(), 0.0);
  }
  const auto totals = apportion(type_mass, n, identity_order(type_mass.size()));
  const Rng base(seed);
  for (std::size_t w = 0; w < xi.types.size(); ++w) {
    std::vector<double> v(xi.xi[w].size());
    for (std::size_t eta = 0; eta < v.size(); ++eta) v[eta] = static_cast<double>(n) * xi.xi[w][eta];
    auto priority = identity_order(v.size());
    Rng rng = base.split(w);
    rng.shuffle(std::span<std::size_t>(priority));
    // Type totals were rounded separately; rescale the row onto its total.
    const double row = std::accumulate(v.begin(), v.end(), 0.0);
    if (row > 0.0 && std::abs(row - static_cast<double>(totals[w])) >= 1e-9) {
      for (auto& x : v) x *= static_cast<double>(totals[w]) / row;
    }
    if (row == 0.0 && totals[w] > 0) v[0] = static_cast<double>(totals[w]);
    out.counts.push_back(apportion(v, totals[w], priority));
  }
  return out;
}

std::vector<std::int64_t> round_statistics(const Statistics& p, std::int64_t n) {
  if (n < 1) throw InvalidArgument("population size must be positive");
  std::vector<double> v(p.size());
  for (std::size_t w = 0; w < p.size(); ++w) v[w] = static_cast<double>(n) * p.mass[w];
  return apportion(v, n, identity_order(v.size()));
}

WiringSampler::WiringSampler(std::vector<std::int32_t> out_degree, std::vector<std::int32_t> in_degree)
    : out_degree_(std::move(out_degree)), in_degree_(std::move(in_degree)) {
  if (out_degree_.size() != in_degree_.size()) {
    throw DimensionMismatch("out-degree and in-degree sequences differ in length");
  }
  if (out_degree_.empty()) throw InvalidArgument("wiring needs at least one node");
  for (std::size_t i = 0; i < out_degree_.size(); ++i) {
    if (out_degree_[i] < 0 || in_degree_[i] < 0) throw InvalidArgument("negative degree");
    tails_.insert(tails_.end(), static_cast<std::size_t>(out_degree_[i]), static_cast<NodeId>(i));
    heads_.insert(heads_.end(), static_cast<std::size_t>(in_degree_[i]), static_cast<NodeId>(i));
  }
  if (tails_.size() != heads_.size()) {
    throw InvalidArgument("out-degrees sum to " + std::to_string(tails_.size()) + " but in-degrees to " +
                          std::to_string(heads_.size()));
  }
}

std::optional<std::vector<Edge>> WiringSampler::draw(Rng& rng) {
  // Forward Fisher-Yates fixes position e at step e, so stopping at the first
  // self-loop rejects exactly the permutations a full draw would reject.
  const std::size_t m = heads_.size();
  for (std::size_t e = 0; e < m; ++e) {
    std::swap(heads_[e], heads_[e + rng.below(m - e)]);
    if (heads_[e] == tails_[e]) return std::nullopt;
  }
  std::vector<Edge> edges(m);
  for (std::size_t e = 0; e < m; ++e) edges[e] = {tails_[e], heads_[e]};
  return edges;
}

WiringSampler::Result WiringSampler::sample(Rng& rng, std::size_t max_attempts) {
  for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
    if (auto edges = draw(rng)) return {MultiGraph(node_count(), *edges), attempt};
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "no self-loop-free wiring in %zu draws (expected self-loops per draw %.4g, "
                "acceptance about %.3g)",
                max_attempts, expected_self_loops(), std::exp(-expected_self_loops()));
  throw SamplingError(buf);
}

double WiringSampler::expected_self_loops() const {
  if (tails_.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < out_degree_.size(); ++i) {
    s += static_cast<double>(out_degree_[i]) * static_cast<double>(in_degree_[i]);
  }
  return s / static_cast<double>(tails_.size());
}

SampledNetwork sample_configuration_model(const Statistics& p, std::int64_t n, Rng& rng,
                                          std::size_t max_attempts) {
  if (n < 1 || n > std::numeric_limits<NodeId>::max()) throw InvalidArgument("population size out of range");
  SampledNetwork out;
  out.assignment.types = p.types;
  out.assignment.counts = round_statistics(p, n);
  std::vector<std::int32_t> kappa;
  std::vector<std::int32_t> delta;
  kappa.reserve(static_cast<std::size_t>(n));
  delta.reserve(static_cast<std::size_t>(n));
  for (std::size_t w = 0; w < p.size(); ++w) {
    for (std::int64_t c = 0; c < out.assignment.counts[w]; ++c) {
      out.assignment.type_of_node.push_back(static_cast<std::int32_t>(w));
      out.rho.values.push_back(p.types[w].r);
      kappa.push_back(p.types[w].k);
      delta.push_back(p.types[w].d);
    }
  }
  WiringSampler sampler(std::move(kappa), std::move(delta));
  auto result = sampler.sample(rng, max_attempts);
  out.graph = std::move(result.graph);
  out.attempts = result.attempts;
  return out;
}

InterventionVector realize_intervention(const TypeAssignment& assignment, const ThresholdVector& rho,
                                        const RoundedIntervention& rounded, Rng& rng) {
  if (assignment.type_of_node.size() != rho.values.size()) {
    throw DimensionMismatch("type assignment and thresholds differ in length");
  }
  if (assignment.types != rounded.types) {
    throw InvalidArgument("rounded intervention refers to different types than the assignment");
  }
  std::vector<std::vector<NodeId>> members(assignment.types.size());
  for (std::size_t i = 0; i < assignment.type_of_node.size(); ++i) {
    members[static_cast<std::size_t>(assignment.type_of_node[i])].push_back(static_cast<NodeId>(i));
  }
  InterventionVector h{std::vector<std::int32_t>(rho.values.size(), 0)};
  for (std::size_t w = 0; w < members.size(); ++w) {
    auto& nodes = members[w];
    std::int64_t needed = 0;
    for (std::size_t eta = 1; eta < rounded.counts[w].size(); ++eta) needed += rounded.counts[w][eta];
    if (needed > static_cast<std::int64_t>(nodes.size())) {
      throw InfeasibleIntervention("intervention needs " + std::to_string(needed) + " agents of type " +
                                   std::to_string(w) + ", only " + std::to_string(nodes.size()) + " exist");
    }
    // Partial Fisher-Yates: the first `needed` entries are a uniform sample.
    for (std::size_t j = 0; j < static_cast<std::size_t>(needed); ++j) {
      std::swap(nodes[j], nodes[j + rng.below(nodes.size() - j)]);
    }
    std::size_t next = 0;
    for (std::size_t eta = 1; eta < rounded.counts[w].size(); ++eta) {
      for (std::int64_t c = 0; c < rounded.counts[w][eta]; ++c) {
        const NodeId i = nodes[next++];
        if (static_cast<std::int32_t>(eta) > rho.values[i]) {
          throw InfeasibleIntervention("threshold reduction exceeds the threshold of node " + std::to_string(i));
        }
        h.values[i] = static_cast<std::int32_t>(eta);
      }
    }
  }
  return h;
}

AcceptanceEstimate acceptance_estimate(const Statistics& p) {
  AcceptanceEstimate a;
  a.nu = branching_nu(p);
  a.undirected_law = std::exp(-a.nu / 2.0);
  const double mean_d = moment(p, Moment::d);
  a.directed_law = mean_d > 0.0 ? std::exp(-moment(p, Moment::dk) / mean_d) : 1.0;
  return a;
}

double sup_deviation(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return 0.0;
  const std::size_t len = std::max(a.size(), b.size());
  double sup = 0.0;
  for (std::size_t t = 0; t < len; ++t) {
    const double x = a[std::min(t, a.size() - 1)];
    const double y = b[std::min(t, b.size() - 1)];
    sup = std::max(sup, std::abs(x - y));
  }
  return sup;
}

McReport monte_carlo_validate(const Statistics& p0, const StatIntervention& xi, const McOptions& opt) {
  if (!(opt.eps > 0.0 && opt.eps <= 1.0)) throw InvalidArgument("eps must lie in (0, 1]");
  xi.validate_against(p0);
  McReport rep;
  rep.options = opt;
  rep.rounded = round_intervention(xi, opt.n, derive_seed(opt.seed, 0x726f756e64ULL));
  rep.realized_cost = rep.rounded.cost() / static_cast<double>(opt.n);
  const Statistics post = statistics_after(rep.rounded);
  rep.acceptance = acceptance_estimate(post);
  const std::size_t horizon = opt.t_max ? opt.t_max : static_cast<std::size_t>(opt.n);
  rep.recursion = recursion(post, horizon);
  if (opt.replicates == 0) return rep;

  rep.runs.resize(opt.replicates);
  parallel_for(opt.replicates, opt.jobs, [&](std::size_t r) {
    auto& run = rep.runs[r];
    run.seed = derive_seed(opt.seed, r + 1);
    Rng rng(run.seed);
    const auto net = sample_configuration_model(post, opt.n, rng, opt.max_attempts);
    const StateVector x0{std::vector<std::uint8_t>(static_cast<std::size_t>(opt.n), 0)};
    auto path = ltm_fraction_path(net.graph, net.rho, x0, horizon);
    run.attempts = net.attempts;
    run.y = std::move(path.active);
    run.z = std::move(path.link_active);
    run.fixed_point = path.fixed_point;
    run.final_active = run.y.back();
    run.success = run.final_active >= 1.0 - opt.eps;
    run.sup_dev_y = sup_deviation(run.y, rep.recursion.y);
    run.sup_dev_z = sup_deviation(run.z, rep.recursion.z);
  });

  std::size_t successes = 0;
  std::size_t draws = 0;
  double sum = 0.0;
  for (const auto& run : rep.runs) {
    successes += run.success ? 1 : 0;
    draws += run.attempts;
    sum += run.final_active;
    rep.max_sup_dev_y = std::max(rep.max_sup_dev_y, run.sup_dev_y);
    rep.max_sup_dev_z = std::max(rep.max_sup_dev_z, run.sup_dev_z);
  }
  const double count = static_cast<double>(rep.runs.size());
  rep.success_rate = static_cast<double>(successes) / count;
  rep.mean_final = sum / count;
  double var = 0.0;
  for (const auto& run : rep.runs) var += (run.final_active - rep.mean_final) * (run.final_active - rep.mean_final);
  rep.stddev_final = rep.runs.size() > 1 ? std::sqrt(var / (count - 1.0)) : 0.0;
  rep.observed_acceptance = count / static_cast<double>(draws);
  return rep;
}

RealizationReport realize_on_network(const MultiGraph& g, const ThresholdVector& rho,
                                     const ExtractedStatistics& extracted, const StatIntervention& xi,
                                     double eps, std::uint64_t seed) {
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("eps must lie in (0, 1]");
  xi.validate_against(extracted.stats);
  RealizationReport rep;
  const std::int64_t n = g.node_count();
  rep.rounded = round_intervention(xi, n, derive_seed(seed, 0x726f756e64ULL));
  TypeAssignment assignment;
  assignment.types = extracted.stats.types;
  assignment.type_of_node = extracted.type_of_node;
  assignment.counts = extracted.stats.counts;
  std::vector<std::int64_t> have(assignment.types.size(), 0);
  for (auto t : extracted.type_of_node) ++have[static_cast<std::size_t>(t)];
  for (std::size_t w = 0; w < assignment.types.size(); ++w) {
    if (rep.rounded.total(w) != have[w]) {
      throw InvalidArgument("intervention does not match the network's type counts");
    }
  }
  Rng rng(derive_seed(seed, 0x7265616cULL));
  rep.h = realize_intervention(assignment, rho, rep.rounded, rng);
  rep.realized_cost = rep.rounded.cost() / static_cast<double>(n);
  const auto reduced = apply_intervention(rho, rep.h);
  const StateVector x0{std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0)};
  auto path = ltm_fraction_path(g, reduced, x0, static_cast<std::size_t>(n));
  rep.y = std::move(path.active);
  rep.z = std::move(path.link_active);
  rep.fixed_point = path.fixed_point;
  rep.final_active = rep.y.back();
  rep.success = rep.final_active >= 1.0 - eps;
  rep.recursion = recursion(statistics_after(rep.rounded), static_cast<std::size_t>(n));
  return rep;
}

}  // namespace ltmopt
