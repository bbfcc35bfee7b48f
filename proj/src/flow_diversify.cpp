#include "recdiv/flow_diversify.hpp"

#include <cmath>
#include <string>
#include <unordered_map>

#include "recdiv/error.hpp"

namespace recdiv {
namespace {

constexpr double kMaxScaledCost = 1125899906842624.0;  // 2^50

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

void check_scale(std::int64_t cost_scale) {
  if (cost_scale <= 0) throw LimitError("cost scale must be a positive integer");
}

// Guards the sum of all costs along any path (and the final objective) from
// int64 overflow.
void check_total_cost(const FlowNetwork& net) {
  double bound = 0.0;
  for (const auto& a : net.arcs()) bound += std::fabs(static_cast<double>(a.cost));
  if (bound > 1e18 / static_cast<double>(net.node_count() + 1)) {
    throw LimitError("scaled network costs are too large for 64-bit arithmetic");
  }
}

GroupIndex single_group(const Grouping& grouping, std::size_t entity, const RecGraph& graph) {
  auto groups = grouping.groups_of(entity);
  if (groups.empty()) {
    const std::string& id = grouping.side() == Side::kUser
                                ? graph.user(static_cast<UserIndex>(entity)).id
                                : graph.item(static_cast<ItemIndex>(entity)).id;
    throw GroupingError(std::string(side_name(grouping.side())) + " '" + id +
                        "' has a candidate edge but no group");
  }
  return groups.front();
}

void require_disjoint(const Grouping& grouping, const RecGraph& graph) {
  validate_grouping(grouping, graph);
  if (!grouping.is_disjoint()) {
    throw GroupingError(std::string(side_name(grouping.side())) +
                        " grouping overlaps; the flow reduction needs disjoint groups");
  }
}

// Users, items and the sink come first; gadget nodes are appended.
ReductionMap base_layout(const RecGraph& graph, FlowNetwork& net, std::int64_t cost_scale) {
  ReductionMap map;
  map.cost_scale = cost_scale;
  map.edge_arc.assign(graph.edge_count(), -1);
  for (UserIndex u = 0; u < graph.user_count(); ++u) {
    map.user_node.push_back(net.add_node(graph.capacity(u)));
  }
  for (ItemIndex v = 0; v < graph.item_count(); ++v) map.item_node.push_back(net.add_node());
  map.sink = net.add_node(-graph.total_capacity());
  return map;
}

void add_sink_arcs(const RecGraph& graph, FlowNetwork& net, ReductionMap& map) {
  for (ItemIndex v = 0; v < graph.item_count(); ++v) {
    map.item_sink_arc.push_back(
        net.add_arc(map.item_node[v], map.sink, kUnboundedCapacity, 0));
  }
  for (UserIndex u = 0; u < graph.user_count(); ++u) {
    map.slack_arc.push_back(net.add_arc(map.user_node[u], map.sink, graph.capacity(u), 0));
  }
}

}  // namespace

std::int64_t scaled_cost(double value, std::int64_t scale) {
  const double scaled = std::nearbyint(value * static_cast<double>(scale));
  if (!std::isfinite(scaled) || std::fabs(scaled) > kMaxScaledCost) {
    throw LimitError("value " + std::to_string(value) + " overflows cost scale " +
                     std::to_string(scale));
  }
  return static_cast<std::int64_t>(scaled);
}

Reduction build_tdiv_network(const RecGraph& graph, const Grouping& user_types,
                             const Grouping& item_categories,
                             const ThresholdTable& thresholds, const DivParams& params,
                             std::int64_t cost_scale) {
  check_scale(cost_scale);
  validate(params);
  require_disjoint(user_types, graph);
  require_disjoint(item_categories, graph);
  validate_thresholds(thresholds, graph, user_types, item_categories);

  const std::int64_t beta_cost = scaled_cost(params.beta, cost_scale);
  const std::int64_t mu_cost = scaled_cost(params.mu, cost_scale);

  Reduction red;
  FlowNetwork& net = red.network;
  ReductionMap& map = red.map;
  map = base_layout(graph, net, cost_scale);

  std::unordered_map<std::uint64_t, std::size_t> category_lookup;
  std::unordered_map<std::uint64_t, std::size_t> type_lookup;

  for (EdgeIndex e = 0; e < graph.edge_count(); ++e) {
    const auto& edge = graph.edge(e);
    const GroupIndex a = single_group(item_categories, edge.item, graph);
    const GroupIndex b = single_group(user_types, edge.user, graph);

    auto [cit, new_category] =
        category_lookup.emplace(pair_key(edge.user, a), map.category_gadgets.size());
    if (new_category) {
      const int rho = thresholds.user_category.get(edge.user, a);
      const FlowNode u = map.user_node[edge.user];
      CategoryGadget g{edge.user, a, net.add_node(), net.add_node(), -1, -1, -1};
      g.bonus_arc = net.add_arc(u, g.bonus_node, rho, -beta_cost);
      g.pass_arc = net.add_arc(g.bonus_node, g.entry_node, rho, 0);
      g.free_arc = net.add_arc(u, g.entry_node, kUnboundedCapacity, 0);
      map.category_gadgets.push_back(g);
    }
    auto [tit, new_type] =
        type_lookup.emplace(pair_key(edge.item, b), map.type_gadgets.size());
    if (new_type) {
      const int lambda = thresholds.item_type.get(edge.item, b);
      const FlowNode v = map.item_node[edge.item];
      TypeGadget g{edge.item, b, net.add_node(), net.add_node(), -1, -1, -1};
      g.pass_arc = net.add_arc(g.entry_node, g.bonus_node, lambda, 0);
      g.bonus_arc = net.add_arc(g.bonus_node, v, lambda, -mu_cost);
      g.free_arc = net.add_arc(g.entry_node, v, kUnboundedCapacity, 0);
      map.type_gadgets.push_back(g);
    }
    map.edge_arc[e] = net.add_arc(map.category_gadgets[cit->second].entry_node,
                                  map.type_gadgets[tit->second].entry_node, 1,
                                  -scaled_cost(edge.relevance, cost_scale));
  }
  add_sink_arcs(graph, net, map);
  check_total_cost(net);
  return red;
}

Reduction build_userdiv_network(const RecGraph& graph, const Grouping& item_categories,
                                std::int64_t cost_scale) {
  check_scale(cost_scale);
  require_disjoint(item_categories, graph);

  Reduction red;
  FlowNetwork& net = red.network;
  ReductionMap& map = red.map;
  map = base_layout(graph, net, cost_scale);

  std::unordered_map<std::uint64_t, std::size_t> category_lookup;
  for (EdgeIndex e = 0; e < graph.edge_count(); ++e) {
    const auto& edge = graph.edge(e);
    const GroupIndex a = single_group(item_categories, edge.item, graph);
    auto [it, inserted] =
        category_lookup.emplace(pair_key(edge.user, a), map.category_gadgets.size());
    if (inserted) {
      const FlowNode u = map.user_node[edge.user];
      CategoryGadget g{edge.user, a, net.add_node(), net.add_node(), -1, -1, -1};
      g.bonus_arc = net.add_arc(u, g.bonus_node, 1, -cost_scale);
      g.pass_arc = net.add_arc(g.bonus_node, g.entry_node, 1, 0);
      g.free_arc = net.add_arc(u, g.entry_node, kUnboundedCapacity, 0);
      map.category_gadgets.push_back(g);
    }
    map.edge_arc[e] = net.add_arc(map.category_gadgets[it->second].entry_node,
                                  map.item_node[edge.item], 1, 0);
  }
  add_sink_arcs(graph, net, map);
  return red;
}

Solution decode_solution(const RecGraph& graph, const Grouping& user_types,
                         const Grouping& item_categories, const ReductionMap& map,
                         const FlowResult& flow) {
  Solution sol(graph, user_types, item_categories);
  for (EdgeIndex e = 0; e < graph.edge_count(); ++e) {
    const FlowArcIndex arc = map.edge_arc[e];
    if (arc >= 0 && flow.flow[arc] > 0) sol.add_edge(e);
  }
  return sol;
}

namespace {

FlowDiversifyResult solve_reduction(const Reduction& red, const RecGraph& graph,
                                    const Grouping& user_types,
                                    const Grouping& item_categories) {
  FlowResult flow = solve_min_cost_flow(red.network);
  if (!flow.feasible) {
    // Unreachable with slack arcs in place; kept as a hard failure.
    throw FlowError("reduction network has no feasible flow");
  }
  return FlowDiversifyResult{
      decode_solution(graph, user_types, item_categories, red.map, flow), flow.total_cost,
      red.map.cost_scale, flow.shortest_path_rounds};
}

}  // namespace

FlowDiversifyResult solve_tdiv_detailed(const RecGraph& graph, const Grouping& user_types,
                                        const Grouping& item_categories,
                                        const ThresholdTable& thresholds,
                                        const DivParams& params, std::int64_t cost_scale) {
  const Reduction red = build_tdiv_network(graph, user_types, item_categories, thresholds,
                                           params, cost_scale);
  return solve_reduction(red, graph, user_types, item_categories);
}

Solution solve_tdiv(const RecGraph& graph, const Grouping& user_types,
                    const Grouping& item_categories, const ThresholdTable& thresholds,
                    const DivParams& params, std::int64_t cost_scale) {
  return solve_tdiv_detailed(graph, user_types, item_categories, thresholds, params,
                             cost_scale)
      .solution;
}

Solution solve_max_div(const RecGraph& graph, const Grouping& user_types,
                       const Grouping& item_categories, const DivParams& params,
                       std::int64_t cost_scale) {
  const ThresholdTable ones = unit_thresholds(graph, user_types, item_categories);
  return solve_tdiv(graph, user_types, item_categories, ones, params, cost_scale);
}

FlowDiversifyResult solve_userdiv(const RecGraph& graph, const Grouping& user_types,
                                  const Grouping& item_categories, std::int64_t cost_scale) {
  const Reduction red = build_userdiv_network(graph, item_categories, cost_scale);
  return solve_reduction(red, graph, user_types, item_categories);
}

}  // namespace recdiv
