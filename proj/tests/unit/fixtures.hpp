#pragma once

#include <string>
#include <utility>
#include <vector>

#include "recdiv/graph.hpp"

namespace recdiv::testing {

// One user (c=2) with v1 (A, .9), v2 (A, .8), v3 (B, .1); one user type;
// rho = lambda = 1 everywhere.
struct ThreeItems {
  RecGraph graph;
  Grouping types;
  Grouping cats;
  ThresholdTable thresholds;

  ThreeItems() {
    RecGraph::Builder b;
    b.add_user("u1", 2);
    for (const char* id : {"v1", "v2", "v3"}) b.add_item(id);
    b.add_edge(0, 0, 0.9);
    b.add_edge(0, 1, 0.8);
    b.add_edge(0, 2, 0.1);
    graph = std::move(b).build();
    Grouping::Builder t(Side::kUser, 1);
    t.add_membership(0, t.group("T"));
    types = std::move(t).build();
    Grouping::Builder c(Side::kItem, 3);
    const auto a = c.group("A");
    const auto bb = c.group("B");
    c.add_membership(0, a);
    c.add_membership(1, a);
    c.add_membership(2, bb);
    cats = std::move(c).build();
    thresholds = ThresholdTable(1, 3);
    thresholds.user_category.set(0, a, 1);
    thresholds.user_category.set(0, bb, 1);
    for (ItemIndex v = 0; v < 3; ++v) thresholds.item_type.set(v, 0, 1);
  }
};

// Grouping from explicit per-entity group-name lists.
inline Grouping make_grouping(Side side, const std::vector<std::vector<std::string>>& groups) {
  Grouping::Builder b(side, groups.size());
  for (std::size_t x = 0; x < groups.size(); ++x) {
    for (const auto& g : groups[x]) b.add_membership(x, b.group(g));
  }
  return std::move(b).build();
}

}  // namespace recdiv::testing
