#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace recdiv {

using UserIndex = std::uint32_t;
using ItemIndex = std::uint32_t;
using EdgeIndex = std::uint32_t;
using GroupIndex = std::uint32_t;

struct UserRecord {
  std::string id;
  int capacity = 0;  // display constraint c_i
};

struct ItemRecord {
  std::string id;
};

struct CandidateEdge {
  UserIndex user = 0;
  ItemIndex item = 0;
  double relevance = 0.0;
};

// Weighted bipartite candidate graph between users and items. Immutable once
// built; edge indices are dense and follow insertion order.
class RecGraph {
 public:
  class Builder {
   public:
    // Throws DataError on duplicate ids or negative capacity.
    UserIndex add_user(std::string id, int capacity);
    ItemIndex add_item(std::string id);
    // Throws DataError on unknown endpoints, a repeated (user, item) pair, or
    // a relevance that is negative or not finite.
    EdgeIndex add_edge(UserIndex user, ItemIndex item, double relevance);

    std::optional<UserIndex> find_user(std::string_view id) const;
    std::optional<ItemIndex> find_item(std::string_view id) const;
    std::size_t user_count() const { return users_.size(); }
    std::size_t item_count() const { return items_.size(); }

    RecGraph build() &&;

   private:
    std::vector<UserRecord> users_;
    std::vector<ItemRecord> items_;
    std::vector<CandidateEdge> edges_;
    std::unordered_map<std::string, UserIndex> user_ids_;
    std::unordered_map<std::string, ItemIndex> item_ids_;
    std::unordered_set<std::uint64_t> pairs_;
  };

  RecGraph() = default;

  std::size_t user_count() const { return users_.size(); }
  std::size_t item_count() const { return items_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const UserRecord& user(UserIndex u) const { return users_[u]; }
  const ItemRecord& item(ItemIndex v) const { return items_[v]; }
  const CandidateEdge& edge(EdgeIndex e) const { return edges_[e]; }
  int capacity(UserIndex u) const { return users_[u].capacity; }
  std::span<const CandidateEdge> edges() const { return edges_; }

  // Edge indices incident to a user / item, ascending.
  std::span<const EdgeIndex> user_edges(UserIndex u) const {
    return {user_adj_.data() + user_off_[u], user_off_[u + 1] - user_off_[u]};
  }
  std::span<const EdgeIndex> item_edges(ItemIndex v) const {
    return {item_adj_.data() + item_off_[v], item_off_[v + 1] - item_off_[v]};
  }

  std::optional<UserIndex> find_user(std::string_view id) const;
  std::optional<ItemIndex> find_item(std::string_view id) const;
  std::optional<EdgeIndex> find_edge(UserIndex u, ItemIndex v) const;

  std::int64_t total_capacity() const;

 private:
  std::vector<UserRecord> users_;
  std::vector<ItemRecord> items_;
  std::vector<CandidateEdge> edges_;
  std::vector<std::size_t> user_off_{0};
  std::vector<EdgeIndex> user_adj_;
  std::vector<std::size_t> item_off_{0};
  std::vector<EdgeIndex> item_adj_;
  std::unordered_map<std::string, UserIndex> user_ids_;
  std::unordered_map<std::string, ItemIndex> item_ids_;
};

enum class Side { kUser, kItem };

const char* side_name(Side side);

// Membership structure over one side of the graph: user types or item
// categories. Entities may belong to zero, one or several groups.
class Grouping {
 public:
  class Builder {
   public:
    Builder(Side side, std::size_t entity_count);

    // Returns the index of the named group, creating it on first use.
    GroupIndex group(std::string_view id);
    // Repeated memberships are ignored. Throws DataError on a bad index.
    void add_membership(std::size_t entity, GroupIndex group);

    Grouping build() &&;

   private:
    Side side_;
    std::size_t entity_count_;
    std::vector<std::string> group_ids_;
    std::unordered_map<std::string, GroupIndex> lookup_;
    std::vector<std::vector<GroupIndex>> memberships_;
  };

  // Grouping with no groups at all over `entity_count` entities.
  static Grouping empty(Side side, std::size_t entity_count);

  Side side() const { return side_; }
  std::size_t entity_count() const { return entity_off_.size() - 1; }
  std::size_t group_count() const { return group_ids_.size(); }
  const std::string& group_id(GroupIndex g) const { return group_ids_[g]; }
  std::optional<GroupIndex> find_group(std::string_view id) const;

  std::span<const std::uint32_t> members(GroupIndex g) const {
    return {members_.data() + group_off_[g], group_off_[g + 1] - group_off_[g]};
  }
  std::span<const GroupIndex> groups_of(std::size_t entity) const {
    return {entity_groups_.data() + entity_off_[entity],
            entity_off_[entity + 1] - entity_off_[entity]};
  }
  bool has_group(std::size_t entity) const { return !groups_of(entity).empty(); }

  // True iff every entity with any membership belongs to exactly one group.
  bool is_disjoint() const { return disjoint_; }

 private:
  Side side_ = Side::kItem;
  std::vector<std::string> group_ids_;
  std::unordered_map<std::string, GroupIndex> lookup_;
  std::vector<std::size_t> group_off_{0};
  std::vector<std::uint32_t> members_;
  std::vector<std::size_t> entity_off_{0};
  std::vector<GroupIndex> entity_groups_;
  bool disjoint_ = true;
};

// Sparse nonnegative integer thresholds keyed by (entity, group); absent
// keys read as 0.
class SparseThresholds {
 public:
  struct Entry {
    GroupIndex group;
    int value;
  };

  explicit SparseThresholds(std::size_t entity_count = 0) : rows_(entity_count) {}

  // Throws DataError for a negative value or an out-of-range entity. Setting
  // 0 removes the key.
  void set(std::size_t entity, GroupIndex group, int value);
  int get(std::size_t entity, GroupIndex group) const;

  std::span<const Entry> row(std::size_t entity) const { return rows_[entity]; }
  std::size_t entity_count() const { return rows_.size(); }
  std::size_t nonzero_count() const;

 private:
  std::vector<std::vector<Entry>> rows_;
};

struct ThresholdTable {
  SparseThresholds user_category;  // rho_i(R_a)
  SparseThresholds item_type;      // lambda_j(L_b)

  ThresholdTable() = default;
  ThresholdTable(std::size_t user_count, std::size_t item_count)
      : user_category(user_count), item_type(item_count) {}
};

struct DivParams {
  double beta = 0.0;
  double mu = 0.0;
};

// Throws DataError unless both parameters are finite and nonnegative.
void validate(const DivParams& params);

// Throws DataError if the grouping does not cover exactly the entities of
// its side of the graph.
void validate_grouping(const Grouping& grouping, const RecGraph& graph);

// Throws DataError if the table's dimensions or group keys do not match the
// graph and groupings.
void validate_thresholds(const ThresholdTable& thresholds, const RecGraph& graph,
                         const Grouping& user_types, const Grouping& item_categories);

// Threshold 1 on every (user, category) and (item, type) pair reachable via a
// candidate edge; turns the thresholded objectives into the plain counts.
ThresholdTable unit_thresholds(const RecGraph& graph, const Grouping& user_types,
                               const Grouping& item_categories);

}  // namespace recdiv
