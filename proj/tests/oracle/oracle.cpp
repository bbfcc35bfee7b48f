#include "oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <utility>

#include "recdiv/error.hpp"

namespace recdiv::oracle {

Counts count(const RecGraph& graph, const Grouping& user_types, const Grouping& item_categories,
             const ThresholdTable& thresholds, const std::vector<EdgeIndex>& edges) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> per_user;
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> per_item;
  Counts c;
  for (EdgeIndex e : edges) {
    const auto& edge = graph.edge(e);
    c.relevance += edge.relevance;
    for (auto a : item_categories.groups_of(edge.item)) ++per_user[{edge.user, a}];
    for (auto b : user_types.groups_of(edge.user)) ++per_item[{edge.item, b}];
  }
  for (const auto& [key, d] : per_user) {
    c.tudiv += std::min(d, thresholds.user_category.get(key.first, key.second));
    c.userdiv += 1;
  }
  for (const auto& [key, d] : per_item) {
    c.tidiv += std::min(d, thresholds.item_type.get(key.first, key.second));
    c.itemdiv += 1;
  }
  return c;
}

double objective(const RecGraph& graph, const Grouping& user_types,
                 const Grouping& item_categories, const ThresholdTable& thresholds,
                 const DivParams& params, const std::vector<EdgeIndex>& edges) {
  const Counts c = count(graph, user_types, item_categories, thresholds, edges);
  return params.beta * static_cast<double>(c.tudiv) + params.mu * static_cast<double>(c.tidiv) +
         c.relevance;
}

double max_div_objective(const RecGraph& graph, const Grouping& user_types,
                         const Grouping& item_categories, const DivParams& params,
                         const std::vector<EdgeIndex>& edges) {
  const Counts c = count(graph, user_types, item_categories, ThresholdTable(graph.user_count(), graph.item_count()), edges);
  return params.beta * static_cast<double>(c.userdiv) +
         params.mu * static_cast<double>(c.itemdiv) + c.relevance;
}

namespace {

double choose(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// All subsets of the user's edges with at most c members, as edge lists.
std::vector<std::vector<EdgeIndex>> subsets(const RecGraph& graph, UserIndex u) {
  const auto adj = graph.user_edges(u);
  std::vector<std::vector<EdgeIndex>> out;
  const std::uint32_t n = static_cast<std::uint32_t>(adj.size());
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) > graph.capacity(u)) continue;
    std::vector<EdgeIndex> s;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) s.push_back(adj[i]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

template <typename Eval>
Optimum enumerate(const RecGraph& graph, Eval eval) {
  if (enumeration_size(graph) > 1e7) throw LimitError("instance too large to enumerate");
  std::vector<std::vector<std::vector<EdgeIndex>>> choices;
  for (UserIndex u = 0; u < graph.user_count(); ++u) {
    if (graph.user_edges(u).size() > 20) throw LimitError("user degree too large to enumerate");
    choices.push_back(subsets(graph, u));
  }
  Optimum best;
  bool have = false;
  std::vector<EdgeIndex> current;
  auto rec = [&](auto&& self, std::size_t u) -> void {
    if (u == choices.size()) {
      std::vector<EdgeIndex> sorted = current;
      std::sort(sorted.begin(), sorted.end());
      const double value = eval(sorted);
      if (!have || value > best.objective || (value == best.objective && sorted < best.edges)) {
        best = {sorted, value};
        have = true;
      }
      return;
    }
    for (const auto& s : choices[u]) {
      const std::size_t mark = current.size();
      current.insert(current.end(), s.begin(), s.end());
      self(self, u + 1);
      current.resize(mark);
    }
  };
  rec(rec, 0);
  return best;
}

}  // namespace

double enumeration_size(const RecGraph& graph) {
  double total = 1.0;
  for (UserIndex u = 0; u < graph.user_count(); ++u) {
    const int d = static_cast<int>(graph.user_edges(u).size());
    double s = 0.0;
    for (int k = 0; k <= std::min(d, graph.capacity(u)); ++k) s += choose(d, k);
    total *= s;
  }
  return total;
}

Optimum brute_force_optimum(const RecGraph& graph, const Grouping& user_types,
                            const Grouping& item_categories, const ThresholdTable& thresholds,
                            const DivParams& params) {
  return enumerate(graph, [&](const std::vector<EdgeIndex>& edges) {
    return objective(graph, user_types, item_categories, thresholds, params, edges);
  });
}

Optimum brute_force_max_div(const RecGraph& graph, const Grouping& user_types,
                            const Grouping& item_categories, const DivParams& params) {
  return enumerate(graph, [&](const std::vector<EdgeIndex>& edges) {
    return max_div_objective(graph, user_types, item_categories, params, edges);
  });
}

std::vector<EdgeIndex> naive_greedy(const RecGraph& graph, const Grouping& user_types,
                                    const Grouping& item_categories,
                                    const ThresholdTable& thresholds, const DivParams& params) {
  std::vector<EdgeIndex> chosen;
  std::vector<bool> used(graph.edge_count(), false);
  std::vector<int> load(graph.user_count(), 0);
  while (true) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> per_user;
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> per_item;
    for (EdgeIndex e : chosen) {
      const auto& edge = graph.edge(e);
      for (auto a : item_categories.groups_of(edge.item)) ++per_user[{edge.user, a}];
      for (auto b : user_types.groups_of(edge.user)) ++per_item[{edge.item, b}];
    }
    bool found = false;
    EdgeIndex best = 0;
    double best_gain = 0.0;
    for (EdgeIndex e = 0; e < graph.edge_count(); ++e) {
      const auto& edge = graph.edge(e);
      if (used[e] || load[edge.user] >= graph.capacity(edge.user)) continue;
      int open_categories = 0;
      for (auto a : item_categories.groups_of(edge.item)) {
        const auto it = per_user.find({edge.user, a});
        const int d = it == per_user.end() ? 0 : it->second;
        if (d < thresholds.user_category.get(edge.user, a)) ++open_categories;
      }
      int open_types = 0;
      for (auto b : user_types.groups_of(edge.user)) {
        const auto it = per_item.find({edge.item, b});
        const int d = it == per_item.end() ? 0 : it->second;
        if (d < thresholds.item_type.get(edge.item, b)) ++open_types;
      }
      const double gain = edge.relevance + params.beta * open_categories + params.mu * open_types;
      if (!found || gain > best_gain) {
        found = true;
        best = e;
        best_gain = gain;
      }
    }
    if (!found) break;
    used[best] = true;
    ++load[graph.edge(best).user];
    chosen.push_back(best);
  }
  return chosen;
}

Instance random_instance(std::mt19937_64& rng, const InstanceShape& shape) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double param_values[] = {0.0, 0.5, 1.0, 4.0};
  std::uniform_int_distribution<int> pick_param(0, 3);
  while (true) {
    const int users = std::uniform_int_distribution<int>(1, shape.max_users)(rng);
    const int items = std::uniform_int_distribution<int>(1, shape.max_items)(rng);
    RecGraph::Builder b;
    for (int u = 0; u < users; ++u) {
      b.add_user("u" + std::to_string(u),
                 std::uniform_int_distribution<int>(1, shape.max_capacity)(rng));
    }
    for (int v = 0; v < items; ++v) b.add_item("v" + std::to_string(v));
    for (int u = 0; u < users; ++u) {
      for (int v = 0; v < items; ++v) {
        if (unit(rng) >= shape.edge_probability) continue;
        const double rel = shape.grid_relevance
                               ? 0.25 * std::uniform_int_distribution<int>(0, 4)(rng)
                               : unit(rng);
        b.add_edge(u, v, rel);
      }
    }
    RecGraph graph = std::move(b).build();
    if (enumeration_size(graph) > shape.max_enumeration) continue;

    auto grouping = [&](Side side, int count) {
      Grouping::Builder g(side, count);
      const int groups = std::uniform_int_distribution<int>(1, shape.max_groups)(rng);
      for (int i = 0; i < groups; ++i) g.group((side == Side::kUser ? "T" : "C") + std::to_string(i));
      for (int x = 0; x < count; ++x) {
        if (!shape.overlapping) {
          g.add_membership(x, std::uniform_int_distribution<int>(0, groups - 1)(rng));
          continue;
        }
        const int k = std::uniform_int_distribution<int>(1, groups)(rng);
        for (int i = 0; i < k; ++i) {
          g.add_membership(x, std::uniform_int_distribution<int>(0, groups - 1)(rng));
        }
      }
      return std::move(g).build();
    };
    Grouping types = grouping(Side::kUser, users);
    Grouping cats = grouping(Side::kItem, items);

    ThresholdTable th(users, items);
    std::uniform_int_distribution<int> pick_threshold(0, shape.max_threshold);
    for (int u = 0; u < users; ++u) {
      for (GroupIndex a = 0; a < cats.group_count(); ++a) th.user_category.set(u, a, pick_threshold(rng));
    }
    for (int v = 0; v < items; ++v) {
      for (GroupIndex t = 0; t < types.group_count(); ++t) th.item_type.set(v, t, pick_threshold(rng));
    }
    DivParams params{param_values[pick_param(rng)], param_values[pick_param(rng)]};
    return Instance{std::move(graph), std::move(types), std::move(cats), std::move(th), params};
  }
}

Solution make_solution(const Instance& inst, const std::vector<EdgeIndex>& edges) {
  Solution sol(inst.graph, inst.user_types, inst.item_categories);
  for (EdgeIndex e : edges) sol.add_edge(e);
  return sol;
}

}  // namespace recdiv::oracle
