#include "recdiv/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "recdiv/error.hpp"

namespace recdiv {
namespace {

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

// Counting-sort style CSR build: offsets has size n+1.
template <typename Key>
void build_csr(std::size_t n, const std::vector<CandidateEdge>& edges, Key key,
               std::vector<std::size_t>& offsets, std::vector<EdgeIndex>& adj) {
  offsets.assign(n + 1, 0);
  for (const auto& e : edges) ++offsets[key(e) + 1];
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  adj.assign(edges.size(), 0);
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (EdgeIndex e = 0; e < edges.size(); ++e) adj[cursor[key(edges[e])]++] = e;
}

}  // namespace

UserIndex RecGraph::Builder::add_user(std::string id, int capacity) {
  if (capacity < 0) {
    throw DataError("user '" + id + "' has negative display constraint");
  }
  const auto index = static_cast<UserIndex>(users_.size());
  if (!user_ids_.emplace(id, index).second) {
    throw DataError("duplicate user id '" + id + "'");
  }
  users_.push_back({std::move(id), capacity});
  return index;
}

ItemIndex RecGraph::Builder::add_item(std::string id) {
  const auto index = static_cast<ItemIndex>(items_.size());
  if (!item_ids_.emplace(id, index).second) {
    throw DataError("duplicate item id '" + id + "'");
  }
  items_.push_back({std::move(id)});
  return index;
}

EdgeIndex RecGraph::Builder::add_edge(UserIndex user, ItemIndex item, double relevance) {
  if (user >= users_.size() || item >= items_.size()) {
    throw DataError("candidate edge references an unknown user or item");
  }
  if (!std::isfinite(relevance) || relevance < 0.0) {
    throw DataError("candidate edge (" + users_[user].id + ", " + items_[item].id +
                    ") has invalid relevance " + std::to_string(relevance));
  }
  if (!pairs_.insert(pair_key(user, item)).second) {
    throw DataError("duplicate candidate edge (" + users_[user].id + ", " +
                    items_[item].id + ")");
  }
  edges_.push_back({user, item, relevance});
  return static_cast<EdgeIndex>(edges_.size() - 1);
}

std::optional<UserIndex> RecGraph::Builder::find_user(std::string_view id) const {
  auto it = user_ids_.find(std::string(id));
  if (it == user_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<ItemIndex> RecGraph::Builder::find_item(std::string_view id) const {
  auto it = item_ids_.find(std::string(id));
  if (it == item_ids_.end()) return std::nullopt;
  return it->second;
}

RecGraph RecGraph::Builder::build() && {
  RecGraph g;
  g.users_ = std::move(users_);
  g.items_ = std::move(items_);
  g.edges_ = std::move(edges_);
  g.user_ids_ = std::move(user_ids_);
  g.item_ids_ = std::move(item_ids_);
  build_csr(g.users_.size(), g.edges_, [](const CandidateEdge& e) { return e.user; },
            g.user_off_, g.user_adj_);
  build_csr(g.items_.size(), g.edges_, [](const CandidateEdge& e) { return e.item; },
            g.item_off_, g.item_adj_);
  return g;
}

std::optional<UserIndex> RecGraph::find_user(std::string_view id) const {
  auto it = user_ids_.find(std::string(id));
  if (it == user_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<ItemIndex> RecGraph::find_item(std::string_view id) const {
  auto it = item_ids_.find(std::string(id));
  if (it == item_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<EdgeIndex> RecGraph::find_edge(UserIndex u, ItemIndex v) const {
  for (EdgeIndex e : user_edges(u)) {
    if (edges_[e].item == v) return e;
  }
  return std::nullopt;
}

std::int64_t RecGraph::total_capacity() const {
  std::int64_t total = 0;
  for (const auto& u : users_) total += u.capacity;
  return total;
}

const char* side_name(Side side) { return side == Side::kUser ? "user" : "item"; }

Grouping::Builder::Builder(Side side, std::size_t entity_count)
    : side_(side), entity_count_(entity_count), memberships_(entity_count) {}

GroupIndex Grouping::Builder::group(std::string_view id) {
  auto [it, inserted] =
      lookup_.emplace(std::string(id), static_cast<GroupIndex>(group_ids_.size()));
  if (inserted) group_ids_.emplace_back(id);
  return it->second;
}

void Grouping::Builder::add_membership(std::size_t entity, GroupIndex group) {
  if (entity >= entity_count_ || group >= group_ids_.size()) {
    throw DataError("grouping membership out of range");
  }
  auto& row = memberships_[entity];
  auto it = std::lower_bound(row.begin(), row.end(), group);
  if (it == row.end() || *it != group) row.insert(it, group);
}

Grouping Grouping::Builder::build() && {
  Grouping g;
  g.side_ = side_;
  g.group_ids_ = std::move(group_ids_);
  g.lookup_ = std::move(lookup_);

  g.entity_off_.assign(entity_count_ + 1, 0);
  std::vector<std::size_t> group_sizes(g.group_ids_.size(), 0);
  for (std::size_t i = 0; i < entity_count_; ++i) {
    const auto& row = memberships_[i];
    g.entity_off_[i + 1] = g.entity_off_[i] + row.size();
    g.entity_groups_.insert(g.entity_groups_.end(), row.begin(), row.end());
    if (row.size() > 1) g.disjoint_ = false;
    for (GroupIndex a : row) ++group_sizes[a];
  }

  g.group_off_.assign(g.group_ids_.size() + 1, 0);
  for (std::size_t a = 0; a < group_sizes.size(); ++a) {
    g.group_off_[a + 1] = g.group_off_[a] + group_sizes[a];
  }
  g.members_.assign(g.group_off_.back(), 0);
  std::vector<std::size_t> cursor(g.group_off_.begin(), g.group_off_.end() - 1);
  for (std::size_t i = 0; i < entity_count_; ++i) {
    for (GroupIndex a : memberships_[i]) {
      g.members_[cursor[a]++] = static_cast<std::uint32_t>(i);
    }
  }
  return g;
}

Grouping Grouping::empty(Side side, std::size_t entity_count) {
  return Builder(side, entity_count).build();
}

std::optional<GroupIndex> Grouping::find_group(std::string_view id) const {
  auto it = lookup_.find(std::string(id));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

void SparseThresholds::set(std::size_t entity, GroupIndex group, int value) {
  if (entity >= rows_.size()) throw DataError("threshold entity out of range");
  if (value < 0) throw DataError("thresholds must be nonnegative");
  auto& row = rows_[entity];
  auto it = std::lower_bound(row.begin(), row.end(), group,
                             [](const Entry& e, GroupIndex g) { return e.group < g; });
  const bool present = it != row.end() && it->group == group;
  if (value == 0) {
    if (present) row.erase(it);
  } else if (present) {
    it->value = value;
  } else {
    row.insert(it, Entry{group, value});
  }
}

int SparseThresholds::get(std::size_t entity, GroupIndex group) const {
  if (entity >= rows_.size()) return 0;
  const auto& row = rows_[entity];
  auto it = std::lower_bound(row.begin(), row.end(), group,
                             [](const Entry& e, GroupIndex g) { return e.group < g; });
  return (it != row.end() && it->group == group) ? it->value : 0;
}

std::size_t SparseThresholds::nonzero_count() const {
  std::size_t n = 0;
  for (const auto& row : rows_) n += row.size();
  return n;
}

void validate(const DivParams& params) {
  if (!std::isfinite(params.beta) || params.beta < 0.0 || !std::isfinite(params.mu) ||
      params.mu < 0.0) {
    throw DataError("beta and mu must be finite and nonnegative");
  }
}

void validate_grouping(const Grouping& grouping, const RecGraph& graph) {
  const std::size_t expected =
      grouping.side() == Side::kUser ? graph.user_count() : graph.item_count();
  if (grouping.entity_count() != expected) {
    throw DataError(std::string(side_name(grouping.side())) + " grouping covers " +
                    std::to_string(grouping.entity_count()) + " entities, graph has " +
                    std::to_string(expected));
  }
}

void validate_thresholds(const ThresholdTable& thresholds, const RecGraph& graph,
                         const Grouping& user_types, const Grouping& item_categories) {
  if (thresholds.user_category.entity_count() != graph.user_count() ||
      thresholds.item_type.entity_count() != graph.item_count()) {
    throw DataError("threshold table dimensions do not match the graph");
  }
  for (std::size_t u = 0; u < graph.user_count(); ++u) {
    for (const auto& entry : thresholds.user_category.row(u)) {
      if (entry.group >= item_categories.group_count()) {
        throw DataError("user threshold references an unknown category");
      }
    }
  }
  for (std::size_t v = 0; v < graph.item_count(); ++v) {
    for (const auto& entry : thresholds.item_type.row(v)) {
      if (entry.group >= user_types.group_count()) {
        throw DataError("item threshold references an unknown user type");
      }
    }
  }
}

ThresholdTable unit_thresholds(const RecGraph& graph, const Grouping& user_types,
                               const Grouping& item_categories) {
  ThresholdTable table(graph.user_count(), graph.item_count());
  for (const auto& e : graph.edges()) {
    for (GroupIndex a : item_categories.groups_of(e.item)) table.user_category.set(e.user, a, 1);
    for (GroupIndex b : user_types.groups_of(e.user)) table.item_type.set(e.item, b, 1);
  }
  return table;
}

}  // namespace recdiv
