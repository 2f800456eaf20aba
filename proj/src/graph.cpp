#include "ltmopt/graph.hpp"

#include <string>

#include "ltmopt/error.hpp"
#include "ltmopt/kernels.hpp"

namespace ltmopt {

MultiGraph::MultiGraph(NodeId node_count, std::span<const Edge> edges)
    : n_(node_count),
      offsets_(static_cast<std::size_t>(node_count) + 1, 0),
      heads_(edges.size()),
      out_degree_(static_cast<std::size_t>(node_count), 0),
      in_degree_(static_cast<std::size_t>(node_count), 0) {
  if (node_count < 1) throw InvalidArgument("graph must have at least one node");
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [t, h] = edges[e];
    if (t < 0 || t >= n_ || h < 0 || h >= n_) {
      throw InvalidArgument("edge " + std::to_string(e) + " has an endpoint outside [0, n)");
    }
    if (t == h) throw InvalidArgument("self-loop at node " + std::to_string(t));
    ++out_degree_[t];
    ++in_degree_[h];
  }
  for (NodeId i = 0; i < n_; ++i) offsets_[i + 1] = offsets_[i] + out_degree_[i];
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges) heads_[fill[e.tail]++] = e.head;
}

std::vector<Edge> MultiGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(heads_.size());
  for (NodeId t = 0; t < n_; ++t) {
    for (NodeId h : heads_of(t)) out.push_back({t, h});
  }
  return out;
}

void validate_thresholds(const MultiGraph& g, const ThresholdVector& rho) {
  if (rho.values.size() != static_cast<std::size_t>(g.node_count())) {
    throw DimensionMismatch("threshold vector length " + std::to_string(rho.values.size()) +
                            " != node count " + std::to_string(g.node_count()));
  }
  for (NodeId i = 0; i < g.node_count(); ++i) {
    const auto r = rho.values[i];
    if (r < 0 || r > g.out_degree(i)) {
      throw InvalidArgument("threshold " + std::to_string(r) + " of node " + std::to_string(i) +
                            " outside [0, out-degree " + std::to_string(g.out_degree(i)) + "]");
    }
  }
}

namespace {

void check_state(const MultiGraph& g, const StateVector& x) {
  if (x.values.size() != static_cast<std::size_t>(g.node_count())) {
    throw DimensionMismatch("state vector length " + std::to_string(x.values.size()) +
                            " != node count " + std::to_string(g.node_count()));
  }
}

// Active-neighbour counts into `counts`, then the threshold compare.
kernels::ActivationTally step_into(const MultiGraph& g, const ThresholdVector& rho,
                                   const StateVector& x, std::vector<std::int32_t>& counts,
                                   StateVector& out) {
  const NodeId n = g.node_count();
  for (NodeId i = 0; i < n; ++i) {
    std::int32_t c = 0;
    for (NodeId j : g.heads_of(i)) c += x.values[j];
    counts[i] = c;
  }
  return kernels::active().activate(counts.data(), rho.values.data(), g.in_degrees().data(),
                                    out.values.data(), static_cast<std::size_t>(n));
}

}  // namespace

StateVector ltm_step(const MultiGraph& g, const ThresholdVector& rho, const StateVector& x) {
  check_state(g, x);
  if (rho.values.size() != x.values.size()) {
    throw DimensionMismatch("threshold and state vectors differ in length");
  }
  std::vector<std::int32_t> counts(x.values.size());
  StateVector out{std::vector<std::uint8_t>(x.values.size())};
  step_into(g, rho, x, counts, out);
  return out;
}

Trajectory ltm_trajectory(const MultiGraph& g, const ThresholdVector& rho, const StateVector& x0,
                          std::size_t t_max) {
  check_state(g, x0);
  if (rho.values.size() != x0.values.size()) {
    throw DimensionMismatch("threshold and state vectors differ in length");
  }
  Trajectory traj;
  traj.states.push_back(x0);
  std::vector<std::int32_t> counts(x0.values.size());
  // One step past the horizon is evaluated (not recorded) so that a fixed
  // point reached exactly at t_max is still flagged.
  for (std::size_t t = 0; t <= t_max; ++t) {
    StateVector next{std::vector<std::uint8_t>(x0.values.size())};
    step_into(g, rho, traj.states.back(), counts, next);
    if (next == traj.states.back()) {
      traj.fixed_point = t;
      break;
    }
    if (t == t_max) break;
    traj.states.push_back(std::move(next));
  }
  return traj;
}

ThresholdVector apply_intervention(const ThresholdVector& rho, const InterventionVector& h) {
  if (rho.values.size() != h.values.size()) {
    throw DimensionMismatch("threshold and intervention vectors differ in length");
  }
  ThresholdVector out{rho.values};
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (h.values[i] < 0 || h.values[i] > rho.values[i]) {
      throw InfeasibleIntervention("intervention " + std::to_string(h.values[i]) + " at node " +
                                   std::to_string(i) + " exceeds threshold " +
                                   std::to_string(rho.values[i]));
    }
    out.values[i] -= h.values[i];
  }
  return out;
}

double active_fraction(const StateVector& x) {
  if (x.values.empty()) return 0.0;
  std::size_t on = 0;
  for (auto v : x.values) on += v;
  return static_cast<double>(on) / static_cast<double>(x.values.size());
}

FractionPath ltm_fraction_path(const MultiGraph& g, const ThresholdVector& rho,
                               const StateVector& x0, std::size_t t_max) {
  check_state(g, x0);
  if (rho.values.size() != x0.values.size()) {
    throw DimensionMismatch("threshold and state vectors differ in length");
  }
  const auto n = static_cast<double>(g.node_count());
  const auto links = static_cast<double>(g.edge_count());
  FractionPath path;
  std::int64_t on = 0;
  std::int64_t on_links = 0;
  for (NodeId i = 0; i < g.node_count(); ++i) {
    on += x0.values[i];
    on_links += x0.values[i] ? g.in_degree(i) : 0;
  }
  auto record = [&](std::int64_t a, std::int64_t l) {
    path.active.push_back(static_cast<double>(a) / n);
    path.link_active.push_back(links > 0 ? static_cast<double>(l) / links : 0.0);
  };
  record(on, on_links);

  StateVector cur = x0;
  StateVector next{std::vector<std::uint8_t>(x0.values.size())};
  std::vector<std::int32_t> counts(x0.values.size());
  for (std::size_t t = 0; t <= t_max; ++t) {
    const auto tally = step_into(g, rho, cur, counts, next);
    if (next == cur) {
      path.fixed_point = t;
      break;
    }
    if (t == t_max) break;
    std::swap(cur, next);
    record(tally.active, tally.weighted);
  }
  path.final_state = std::move(cur);
  return path;
}

bool check_target(const MultiGraph& g, const ThresholdVector& rho, const InterventionVector& h,
                  double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("eps must lie in (0, 1]");
  const auto reduced = apply_intervention(rho, h);
  const StateVector zero{std::vector<std::uint8_t>(static_cast<std::size_t>(g.node_count()), 0)};
  const auto path = ltm_fraction_path(g, reduced, zero, static_cast<std::size_t>(g.node_count()));
  return path.active.back() >= 1.0 - eps;
}

}  // namespace ltmopt
