#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "recdiv/graph.hpp"
#include "recdiv/metrics.hpp"
#include "recdiv/solution.hpp"

namespace recdiv {

struct Rating {
  std::string user;
  std::string item;
  double rating = 0.0;
};

struct RatingsDataset {
  std::vector<Rating> ratings;  // file order
};

// Reads (user, item, rating) triples. The delimiter is detected from the
// first data line: "::" (MovieLens), tab, or comma. A first line whose
// rating field is not numeric is treated as a header. Columns after the
// third are dropped. Throws DataError naming the line for malformed rows,
// non-finite ratings and repeated (user, item) pairs.
RatingsDataset parse_ratings(std::istream& in, const std::string& source);
RatingsDataset load_ratings(const std::string& path);

// Tab-separated with a "user\titem\trating" header.
void write_ratings(std::ostream& out, const RatingsDataset& data);
void save_ratings(const std::string& path, const RatingsDataset& data);

struct SplitSpec {
  int folds = 5;
  int min_ratings = 50;  // a user is a test user with strictly more ratings
  std::uint64_t seed = 0;
};

struct Fold {
  RatingsDataset train;
  RatingsDataset test;
};

// Throws DataError unless folds >= 2 and min_ratings >= 1.
void validate(const SplitSpec& spec);

// Shuffles each user's ratings (users visited in id order, one seeded
// engine) and deals them round-robin into `folds` buckets. Fold f tests on
// bucket f of the eligible users and trains on every other rating. Both
// halves keep the input order.
std::vector<Fold> split_folds(const RatingsDataset& data, const SplitSpec& spec);

// Raw "entity_id<TAB>g1|g2|..." rows. A line in MovieLens "::" layout takes
// its first field as the id and its last as the group list. An id alone is
// an entity with no groups.
struct GroupingRows {
  std::vector<std::pair<std::string, std::vector<std::string>>> rows;
};

GroupingRows parse_grouping_rows(std::istream& in, const std::string& source);
GroupingRows load_grouping_rows(const std::string& path);

struct GroupingLoad {
  Grouping grouping;
  std::size_t unknown_entities = 0;  // rows skipped because the id is not in the graph
};

GroupingLoad make_grouping(const GroupingRows& rows, Side side, const RecGraph& graph);
GroupingLoad load_grouping(const std::string& path, Side side, const RecGraph& graph);

void write_grouping(std::ostream& out, const Grouping& grouping, const RecGraph& graph);
void save_grouping(const std::string& path, const Grouping& grouping, const RecGraph& graph);

struct CandidateRow {
  std::string user;
  std::string item;
  double relevance = 0.0;
};

// "user_id<TAB>item_id<TAB>relevance", optional header. Throws DataError on
// malformed rows, negative or non-finite relevance and repeated pairs.
std::vector<CandidateRow> parse_candidates(std::istream& in, const std::string& source);
std::vector<CandidateRow> read_candidates(const std::string& path);
void write_candidates(std::ostream& out, const RecGraph& graph);
void save_candidates(const std::string& path, const RecGraph& graph);

struct DisplayConstraints {
  int uniform = 10;
  std::unordered_map<std::string, int> per_user;  // overrides uniform

  int of(const std::string& user) const;
};

// "user_id<TAB>c" rows; throws DataError on negative or malformed values.
DisplayConstraints load_display_constraints(const std::string& path, int fallback);
void write_display_constraints(std::ostream& out, const RecGraph& graph);

// Explicit id universe. When given, the graph has exactly these users and
// items in this order and candidate rows outside it are skipped.
struct IdUniverse {
  std::vector<std::string> users;
  std::vector<std::string> items;
};

struct CandidateLoad {
  RecGraph graph;
  std::size_t skipped_rows = 0;
};

// Keeps each user's top_n candidates by relevance (earlier rows win ties)
// and builds the graph, adding kept edges in row order. Without a universe
// the users and items are those of the rows, in order of first appearance.
CandidateLoad build_candidate_graph(const std::vector<CandidateRow>& rows, std::size_t top_n,
                                    const DisplayConstraints& constraints,
                                    const IdUniverse* universe = nullptr);
CandidateLoad load_candidates(const std::string& path, std::size_t top_n,
                              const DisplayConstraints& constraints,
                              const IdUniverse* universe = nullptr);

// Users and items of the ratings plus the ids of the grouping rows, each in
// order of first appearance.
IdUniverse universe_of(const RatingsDataset& ratings, const GroupingRows* user_rows,
                       const GroupingRows* item_rows);

struct Interaction {
  UserIndex user;
  ItemIndex item;
};

// Ratings whose user and item are in the graph; the rest are counted.
std::vector<Interaction> map_interactions(const RatingsDataset& data, const RecGraph& graph,
                                          std::size_t* skipped = nullptr);

// Every user with a test rating is a test user; the relevant set holds the
// items rated at least min_rating.
TestRelevance test_relevance(const RatingsDataset& test, const RecGraph& graph,
                             double min_rating = 3.0);

// Solutions: "user_id<TAB>item_id<TAB>relevance<TAB>method" with a header,
// users ascending, each list in rank order.
void write_solution(std::ostream& out, const RecGraph& graph, const RankedLists& ranked,
                    const std::string& method);
void save_solution(const std::string& path, const RecGraph& graph, const RankedLists& ranked,
                   const std::string& method);
// Throws DataError if a row names a user, item or pair absent from the graph.
RankedLists read_solution(std::istream& in, const std::string& source, const RecGraph& graph);
RankedLists load_solution(const std::string& path, const RecGraph& graph);

// Thresholds: "user<TAB>user_id<TAB>category<TAB>rho" and
// "item<TAB>item_id<TAB>type<TAB>lambda" rows; zero entries are omitted.
void write_thresholds(std::ostream& out, const ThresholdTable& table, const RecGraph& graph,
                      const Grouping& user_types, const Grouping& item_categories);
void save_thresholds(const std::string& path, const ThresholdTable& table,
                     const RecGraph& graph, const Grouping& user_types,
                     const Grouping& item_categories);
ThresholdTable read_thresholds(std::istream& in, const std::string& source,
                               const RecGraph& graph, const Grouping& user_types,
                               const Grouping& item_categories);
ThresholdTable load_thresholds(const std::string& path, const RecGraph& graph,
                               const Grouping& user_types, const Grouping& item_categories);

}  // namespace recdiv
