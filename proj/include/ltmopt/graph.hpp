#pragma once

// Directed multigraphs and the synchronous linear threshold dynamics.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ltmopt {

using NodeId = std::int32_t;

struct Edge {
  NodeId tail;
  NodeId head;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Directed multigraph without self-loops. Adjacency is stored as heads grouped
// by tail (CSR), so a node's observed neighbours are contiguous; parallel
// edges appear with multiplicity.
class MultiGraph {
 public:
  MultiGraph() = default;
  // Throws InvalidArgument on a self-loop, an out-of-range endpoint or n < 1.
  MultiGraph(NodeId node_count, std::span<const Edge> edges);

  NodeId node_count() const { return n_; }
  std::size_t edge_count() const { return heads_.size(); }

  std::span<const NodeId> heads_of(NodeId tail) const {
    return {heads_.data() + offsets_[tail], heads_.data() + offsets_[tail + 1]};
  }
  std::int32_t out_degree(NodeId i) const { return out_degree_[i]; }
  std::int32_t in_degree(NodeId i) const { return in_degree_[i]; }
  const std::vector<std::int32_t>& out_degrees() const { return out_degree_; }
  const std::vector<std::int32_t>& in_degrees() const { return in_degree_; }

  // Edges in CSR order (grouped by tail, heads in insertion order).
  std::vector<Edge> edges() const;

 private:
  NodeId n_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> heads_;
  std::vector<std::int32_t> out_degree_;
  std::vector<std::int32_t> in_degree_;
};

struct ThresholdVector {
  std::vector<std::int32_t> values;
};

struct StateVector {
  std::vector<std::uint8_t> values;
  friend bool operator==(const StateVector&, const StateVector&) = default;
};

struct InterventionVector {
  std::vector<std::int32_t> values;
};

// Throws DimensionMismatch / InvalidArgument unless 0 <= rho_i <= kappa_i.
void validate_thresholds(const MultiGraph& g, const ThresholdVector& rho);

// One synchronous update: node i becomes 1 iff sum_j A_ij x_j >= rho_i.
StateVector ltm_step(const MultiGraph& g, const ThresholdVector& rho, const StateVector& x);

struct Trajectory {
  std::vector<StateVector> states;        // x(0), ..., x(T)
  std::optional<std::size_t> fixed_point;  // T when x(T+1) == x(T)
};

Trajectory ltm_trajectory(const MultiGraph& g, const ThresholdVector& rho, const StateVector& x0,
                          std::size_t t_max);

// rho - h; throws InfeasibleIntervention if some h_i > rho_i or h_i < 0.
ThresholdVector apply_intervention(const ThresholdVector& rho, const InterventionVector& h);

double active_fraction(const StateVector& x);

// Simulates x(t+1) = Phi_{rho-h}(x(t)) from all zeros for n steps (stopping
// at a fixed point) and checks the final active fraction against 1 - eps.
bool check_target(const MultiGraph& g, const ThresholdVector& rho, const InterventionVector& h,
                  double eps);

// Aggregate path of a run from a given state, without storing states:
// Y(t) = active fraction, Z(t) = fraction of edges whose head is active.
struct FractionPath {
  std::vector<double> active;      // Y(0..T)
  std::vector<double> link_active; // Z(0..T)
  std::optional<std::size_t> fixed_point;
  StateVector final_state;
};

FractionPath ltm_fraction_path(const MultiGraph& g, const ThresholdVector& rho,
                               const StateVector& x0, std::size_t t_max);

}  // namespace ltmopt
