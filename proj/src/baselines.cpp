#include "recdiv/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "recdiv/error.hpp"

namespace recdiv {
namespace {

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw DataError("lambda must lie in [0, 1], got " + std::to_string(lambda));
  }
}

// Greedy list builder shared by the rerankers. score(slot) gives the current
// score of remaining candidate `slot`; picked(slot) is called after each pick.
template <typename Score, typename Picked>
std::vector<RankedEntry> pick_greedily(std::span<const EdgeIndex> candidates, int capacity,
                                       Score score, Picked picked) {
  std::vector<RankedEntry> list;
  std::vector<bool> taken(candidates.size(), false);
  const std::size_t want = std::min<std::size_t>(capacity, candidates.size());
  while (list.size() < want) {
    std::size_t best = candidates.size();
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (taken[i]) continue;
      const double s = score(i);
      // candidates are ascending by edge index, so strict > keeps the lowest
      if (best == candidates.size() || s > best_score) {
        best = i;
        best_score = s;
      }
    }
    taken[best] = true;
    list.push_back({candidates[best], best_score});
    picked(best);
  }
  return list;
}

}  // namespace

RankedLists top_k(const RecGraph& graph) {
  RankedLists out;
  out.lists.resize(graph.user_count());
  for (UserIndex u = 0; u < graph.user_count(); ++u) {
    auto& list = out.lists[u];
    for (EdgeIndex e : graph.user_edges(u)) list.push_back({e, graph.edge(e).relevance});
    std::stable_sort(list.begin(), list.end(), [](const RankedEntry& a, const RankedEntry& b) {
      return a.score > b.score;
    });
    if (list.size() > static_cast<std::size_t>(graph.capacity(u))) list.resize(graph.capacity(u));
  }
  return out;
}

RankedLists mmr(const RecGraph& graph, const Grouping& item_categories, double lambda) {
  check_lambda(lambda);
  validate_grouping(item_categories, graph);
  RankedLists out;
  out.lists.resize(graph.user_count());
  for (UserIndex u = 0; u < graph.user_count(); ++u) {
    const auto candidates = graph.user_edges(u);
    std::vector<double> min_dist(candidates.size(), 0.0);
    bool first = true;
    out.lists[u] = pick_greedily(
        candidates, graph.capacity(u),
        [&](std::size_t i) {
          const double rel = graph.edge(candidates[i]).relevance;
          if (first) return rel;
          return lambda * rel + (1.0 - lambda) * min_dist[i];
        },
        [&](std::size_t chosen) {
          const ItemIndex v = graph.edge(candidates[chosen]).item;
          for (std::size_t i = 0; i < candidates.size(); ++i) {
            const double d = category_distance(item_categories, v, graph.edge(candidates[i]).item);
            min_dist[i] = first ? d : std::min(min_dist[i], d);
          }
          first = false;
        });
  }
  return out;
}

RankedLists xquad(const RecGraph& graph, const Grouping& item_categories,
                  const IntentProfile& intent, double lambda) {
  check_lambda(lambda);
  validate_grouping(item_categories, graph);
  validate(intent, graph);
  RankedLists out;
  out.lists.resize(graph.user_count());
  for (UserIndex u = 0; u < graph.user_count(); ++u) {
    const auto candidates = graph.user_edges(u);
    const auto& intents = intent.user_intents[u];
    // masked[i * A + a] = rel_a of candidate i
    const std::size_t aspects = intents.size();
    std::vector<double> masked(candidates.size() * aspects, 0.0);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const auto groups = item_categories.groups_of(graph.edge(candidates[i]).item);
      for (std::size_t a = 0; a < aspects; ++a) {
        if (std::binary_search(groups.begin(), groups.end(), intents[a].category)) {
          masked[i * aspects + a] = intent.normalized_relevance[candidates[i]];
        }
      }
    }
    std::vector<double> uncovered(aspects, 1.0);
    out.lists[u] = pick_greedily(
        candidates, graph.capacity(u),
        [&](std::size_t i) {
          double diversity = 0.0;
          for (std::size_t a = 0; a < aspects; ++a) {
            diversity += intents[a].probability * masked[i * aspects + a] * uncovered[a];
          }
          return lambda * graph.edge(candidates[i]).relevance + (1.0 - lambda) * diversity;
        },
        [&](std::size_t chosen) {
          for (std::size_t a = 0; a < aspects; ++a) {
            uncovered[a] *= 1.0 - masked[chosen * aspects + a];
          }
        });
  }
  return out;
}

}  // namespace recdiv
