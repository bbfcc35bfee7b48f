#pragma once

#include <cstdint>
#include <vector>

#include "recdiv/graph.hpp"
#include "recdiv/mcmf.hpp"
#include "recdiv/solution.hpp"

namespace recdiv {

// Real-valued costs (relevance, beta, mu) are multiplied by this and rounded
// half-to-even before entering the integer network.
inline constexpr std::int64_t kDefaultCostScale = 1'000'000;

// The (n'_{i,a}, n_{i,a}) gadget for one user and one category it reaches.
struct CategoryGadget {
  UserIndex user;
  GroupIndex category;
  FlowNode bonus_node;      // n'
  FlowNode entry_node;      // n
  FlowArcIndex bonus_arc;   // u -> n', capacity rho, cost -beta
  FlowArcIndex pass_arc;    // n' -> n, capacity rho
  FlowArcIndex free_arc;    // u -> n, unbounded
};

// The (m_{j,b}, m'_{j,b}) gadget for one item and one user type reaching it.
struct TypeGadget {
  ItemIndex item;
  GroupIndex type;
  FlowNode entry_node;      // m
  FlowNode bonus_node;      // m'
  FlowArcIndex pass_arc;    // m -> m', capacity lambda
  FlowArcIndex bonus_arc;   // m' -> v, capacity lambda, cost -mu
  FlowArcIndex free_arc;    // m -> v, unbounded
};

// Where each piece of the candidate graph lives in the reduction network.
struct ReductionMap {
  std::vector<FlowArcIndex> edge_arc;  // per candidate edge, -1 if absent
  std::vector<FlowNode> user_node;
  std::vector<FlowNode> item_node;
  FlowNode sink = -1;
  std::vector<FlowArcIndex> slack_arc;      // per user, u -> t
  std::vector<FlowArcIndex> item_sink_arc;  // per item, v -> t
  std::vector<CategoryGadget> category_gadgets;
  std::vector<TypeGadget> type_gadgets;
  std::int64_t cost_scale = kDefaultCostScale;
};

struct Reduction {
  FlowNetwork network;
  ReductionMap map;
};

// Network whose minimum-cost flow selects H maximizing
// beta * TUDiv(H) + mu * TIDiv(H) + rel(H). Gadgets are created lazily, only
// for (user, category) and (item, type) pairs touched by a candidate edge, in
// edge-index order. Each user additionally gets a zero-cost slack arc to the
// sink so users with fewer than c_i candidates stay feasible.
//
// Throws GroupingError if either grouping overlaps or an entity incident to a
// candidate edge has no group, LimitError if a scaled cost would overflow.
Reduction build_tdiv_network(const RecGraph& graph, const Grouping& user_types,
                             const Grouping& item_categories,
                             const ThresholdTable& thresholds, const DivParams& params,
                             std::int64_t cost_scale = kDefaultCostScale);

// Category-count-only network: one unit of reward (cost -scale) per
// (user, category) hit, zero-cost candidate arcs straight into items.
Reduction build_userdiv_network(const RecGraph& graph, const Grouping& item_categories,
                                std::int64_t cost_scale = kDefaultCostScale);

// Edges whose candidate arc carries one unit of flow.
Solution decode_solution(const RecGraph& graph, const Grouping& user_types,
                         const Grouping& item_categories, const ReductionMap& map,
                         const FlowResult& flow);

struct FlowDiversifyResult {
  Solution solution;
  std::int64_t total_cost;
  std::int64_t cost_scale;
  std::int64_t shortest_path_rounds;
};

FlowDiversifyResult solve_tdiv_detailed(const RecGraph& graph, const Grouping& user_types,
                                        const Grouping& item_categories,
                                        const ThresholdTable& thresholds,
                                        const DivParams& params,
                                        std::int64_t cost_scale = kDefaultCostScale);

// Exact optimum of MAX-TDiv for disjoint groupings, up to the cost-scale
// quantization of the real-valued weights.
Solution solve_tdiv(const RecGraph& graph, const Grouping& user_types,
                    const Grouping& item_categories, const ThresholdTable& thresholds,
                    const DivParams& params, std::int64_t cost_scale = kDefaultCostScale);

// MAX-Div: the unthresholded objective beta * UserDiv + mu * ItemDiv + rel,
// solved as the all-ones threshold case of the TDiv network.
Solution solve_max_div(const RecGraph& graph, const Grouping& user_types,
                       const Grouping& item_categories, const DivParams& params,
                       std::int64_t cost_scale = kDefaultCostScale);

// Maximizes UserDiv alone. user_types only feeds the returned Solution's
// bookkeeping.
FlowDiversifyResult solve_userdiv(const RecGraph& graph, const Grouping& user_types,
                                  const Grouping& item_categories,
                                  std::int64_t cost_scale = kDefaultCostScale);

// round-half-even(value * scale); throws LimitError past 2^50.
std::int64_t scaled_cost(double value, std::int64_t scale);

}  // namespace recdiv
