#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

namespace recdiv {

using FlowNode = std::int32_t;
using FlowArcIndex = std::int32_t;

// Stands in for "unbounded" arc capacity. Kept well below int64 max so
// residual arithmetic never overflows.
inline constexpr std::int64_t kUnboundedCapacity = std::numeric_limits<std::int64_t>::max() / 8;

struct FlowArc {
  FlowNode tail;
  FlowNode head;
  std::int64_t capacity;
  std::int64_t cost;
};

// Directed network with integer capacities, signed integer costs and node
// supplies (positive = source, negative = demand). Parallel arcs are kept
// distinct.
class FlowNetwork {
 public:
  FlowNetwork() = default;
  explicit FlowNetwork(std::size_t node_count) : supply_(node_count, 0) {}

  FlowNode add_node(std::int64_t supply = 0);
  FlowArcIndex add_arc(FlowNode tail, FlowNode head, std::int64_t capacity, std::int64_t cost);
  void set_supply(FlowNode node, std::int64_t supply) { supply_[node] = supply; }

  std::size_t node_count() const { return supply_.size(); }
  std::size_t arc_count() const { return arcs_.size(); }
  const FlowArc& arc(FlowArcIndex a) const { return arcs_[a]; }
  std::span<const FlowArc> arcs() const { return arcs_; }
  std::int64_t supply(FlowNode node) const { return supply_[node]; }
  std::span<const std::int64_t> supplies() const { return supply_; }

 private:
  std::vector<FlowArc> arcs_;
  std::vector<std::int64_t> supply_;
};

struct FlowResult {
  std::vector<std::int64_t> flow;  // per arc
  std::int64_t total_cost = 0;
  bool feasible = false;
  // Final node potentials: every residual arc has reduced cost
  // cost + potential[tail] - potential[head] >= 0.
  std::vector<std::int64_t> potential;
  std::int64_t augmentations = 0;
  std::int64_t shortest_path_rounds = 0;
};

// Exact minimum-cost flow by successive shortest paths with node potentials.
// Initial potentials come from a label-correcting pass, so negative arc costs
// are fine as long as no negative cycle with positive capacity exists.
//
// Throws FlowError for a malformed network (bad node index, negative
// capacity, supplies not summing to zero) and NegativeCycleError when a
// negative-cost cycle is found. An unsatisfiable supply pattern returns
// feasible == false with the partial flow reached when no supply node can
// reach any remaining demand; it need not conserve flow.
FlowResult solve_min_cost_flow(const FlowNetwork& net);

// True iff result has one flow value per arc, respects 0 <= flow <= capacity
// and conserves flow at every node (inflow - outflow == -supply).
bool validate_flow(const FlowNetwork& net, const FlowResult& result);

// DIMACS min-cost-flow text format ("p min", "n", "a" lines, 1-based nodes,
// zero lower bounds). Throws DataError on malformed input.
void write_dimacs(std::ostream& out, const FlowNetwork& net);
FlowNetwork read_dimacs(std::istream& in);

}  // namespace recdiv
