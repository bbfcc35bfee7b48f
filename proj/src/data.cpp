#include "recdiv/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <string_view>
#include <unordered_set>

#include "recdiv/error.hpp"
#include "recdiv/format.hpp"

namespace recdiv {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line, std::string_view delim) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = line.find(delim);
    if (pos == std::string_view::npos) {
      out.push_back(line);
      return out;
    }
    out.push_back(line.substr(0, pos));
    line.remove_prefix(pos + delim.size());
  }
}

std::string_view detect_delimiter(std::string_view line) {
  if (line.find("::") != std::string_view::npos) return "::";
  if (line.find('\t') != std::string_view::npos) return "\t";
  return ",";
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw DataError(source + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw DataError("write to " + path + " failed");
}

struct Triple {
  std::string a;
  std::string b;
  double value;
  std::size_t line;
};

// Shared reader for ratings and candidate files.
std::vector<Triple> parse_triples(std::istream& in, const std::string& source,
                                  const char* value_name) {
  std::vector<Triple> out;
  std::unordered_set<std::string> seen;
  std::string raw;
  std::string_view delim;
  bool first = true;
  for (std::size_t n = 1; std::getline(in, raw); ++n) {
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (first) delim = detect_delimiter(line);
    const auto fields = split(line, delim);
    const bool header_candidate = first;
    first = false;
    if (fields.size() < 3) fail(source, n, "expected at least 3 fields");
    const auto value = parse_real(fields[2]);
    if (!value) {
      if (header_candidate) continue;
      fail(source, n, std::string("unparseable ") + value_name + " '" +
                          std::string(fields[2]) + "'");
    }
    if (!std::isfinite(*value)) fail(source, n, std::string(value_name) + " is not finite");
    const auto a = trim(fields[0]);
    const auto b = trim(fields[1]);
    if (a.empty() || b.empty()) fail(source, n, "empty id");
    std::string key(a);
    key.push_back('\0');
    key.append(b);
    if (!seen.insert(std::move(key)).second) {
      fail(source, n, "repeated pair (" + std::string(a) + ", " + std::string(b) + ")");
    }
    out.push_back({std::string(a), std::string(b), *value, n});
  }
  return out;
}

}  // namespace

RatingsDataset parse_ratings(std::istream& in, const std::string& source) {
  RatingsDataset data;
  for (auto& t : parse_triples(in, source, "rating")) {
    data.ratings.push_back({std::move(t.a), std::move(t.b), t.value});
  }
  return data;
}

RatingsDataset load_ratings(const std::string& path) {
  auto in = open_in(path);
  return parse_ratings(in, path);
}

void write_ratings(std::ostream& out, const RatingsDataset& data) {
  out << "user\titem\trating\n";
  for (const auto& r : data.ratings) {
    out << r.user << '\t' << r.item << '\t' << format_real(r.rating) << '\n';
  }
}

void save_ratings(const std::string& path, const RatingsDataset& data) {
  auto out = open_out(path);
  write_ratings(out, data);
  finish(out, path);
}

void validate(const SplitSpec& spec) {
  if (spec.folds < 2) throw DataError("fold count must be at least 2");
  if (spec.min_ratings < 1) throw DataError("minimum rating count must be at least 1");
}

std::vector<Fold> split_folds(const RatingsDataset& data, const SplitSpec& spec) {
  validate(spec);
  std::map<std::string, std::vector<std::size_t>> by_user;
  for (std::size_t i = 0; i < data.ratings.size(); ++i) {
    by_user[data.ratings[i].user].push_back(i);
  }
  std::mt19937_64 engine(spec.seed);
  std::vector<int> bucket(data.ratings.size(), 0);
  std::vector<bool> eligible(data.ratings.size(), false);
  for (auto& [user, indices] : by_user) {
    std::shuffle(indices.begin(), indices.end(), engine);
    const bool test_user = indices.size() > static_cast<std::size_t>(spec.min_ratings);
    for (std::size_t p = 0; p < indices.size(); ++p) {
      bucket[indices[p]] = static_cast<int>(p % static_cast<std::size_t>(spec.folds));
      eligible[indices[p]] = test_user;
    }
  }
  std::vector<Fold> folds(spec.folds);
  for (int f = 0; f < spec.folds; ++f) {
    for (std::size_t i = 0; i < data.ratings.size(); ++i) {
      if (eligible[i] && bucket[i] == f) {
        folds[f].test.ratings.push_back(data.ratings[i]);
      } else {
        folds[f].train.ratings.push_back(data.ratings[i]);
      }
    }
  }
  return folds;
}

GroupingRows parse_grouping_rows(std::istream& in, const std::string& source) {
  GroupingRows out;
  std::string raw;
  for (std::size_t n = 1; std::getline(in, raw); ++n) {
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    std::string_view id;
    std::string_view groups;
    if (line.find("::") != std::string_view::npos) {
      const auto fields = split(line, "::");
      id = fields.front();
      if (fields.size() > 1) groups = fields.back();
    } else if (const auto tab = line.find('\t'); tab != std::string_view::npos) {
      id = line.substr(0, tab);
      groups = line.substr(tab + 1);
    } else {
      id = line;
    }
    id = trim(id);
    if (id.empty()) fail(source, n, "empty entity id");
    std::vector<std::string> names;
    for (auto g : split(groups, "|")) {
      g = trim(g);
      if (!g.empty()) names.emplace_back(g);
    }
    out.rows.emplace_back(std::string(id), std::move(names));
  }
  return out;
}

GroupingRows load_grouping_rows(const std::string& path) {
  auto in = open_in(path);
  return parse_grouping_rows(in, path);
}

GroupingLoad make_grouping(const GroupingRows& rows, Side side, const RecGraph& graph) {
  const std::size_t count = side == Side::kUser ? graph.user_count() : graph.item_count();
  Grouping::Builder builder(side, count);
  std::size_t unknown = 0;
  for (const auto& [id, groups] : rows.rows) {
    const auto entity = side == Side::kUser ? graph.find_user(id) : graph.find_item(id);
    if (!entity) {
      ++unknown;
      continue;
    }
    for (const auto& g : groups) builder.add_membership(*entity, builder.group(g));
  }
  return {std::move(builder).build(), unknown};
}

GroupingLoad load_grouping(const std::string& path, Side side, const RecGraph& graph) {
  return make_grouping(load_grouping_rows(path), side, graph);
}

void write_grouping(std::ostream& out, const Grouping& grouping, const RecGraph& graph) {
  for (std::size_t x = 0; x < grouping.entity_count(); ++x) {
    out << (grouping.side() == Side::kUser ? graph.user(x).id : graph.item(x).id) << '\t';
    bool first = true;
    for (GroupIndex g : grouping.groups_of(x)) {
      if (!first) out << '|';
      out << grouping.group_id(g);
      first = false;
    }
    out << '\n';
  }
}

void save_grouping(const std::string& path, const Grouping& grouping, const RecGraph& graph) {
  auto out = open_out(path);
  write_grouping(out, grouping, graph);
  finish(out, path);
}

std::vector<CandidateRow> parse_candidates(std::istream& in, const std::string& source) {
  std::vector<CandidateRow> rows;
  for (auto& t : parse_triples(in, source, "relevance")) {
    if (t.value < 0.0) fail(source, t.line, "negative relevance");
    rows.push_back({std::move(t.a), std::move(t.b), t.value});
  }
  return rows;
}

std::vector<CandidateRow> read_candidates(const std::string& path) {
  auto in = open_in(path);
  return parse_candidates(in, path);
}

void write_candidates(std::ostream& out, const RecGraph& graph) {
  out << "user_id\titem_id\trelevance\n";
  for (const auto& e : graph.edges()) {
    out << graph.user(e.user).id << '\t' << graph.item(e.item).id << '\t'
        << format_real(e.relevance) << '\n';
  }
}

void save_candidates(const std::string& path, const RecGraph& graph) {
  auto out = open_out(path);
  write_candidates(out, graph);
  finish(out, path);
}

int DisplayConstraints::of(const std::string& user) const {
  const auto it = per_user.find(user);
  return it == per_user.end() ? uniform : it->second;
}

DisplayConstraints load_display_constraints(const std::string& path, int fallback) {
  auto in = open_in(path);
  DisplayConstraints dc;
  dc.uniform = fallback;
  std::string raw;
  bool first = true;
  for (std::size_t n = 1; std::getline(in, raw); ++n) {
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const auto fields = split(line, detect_delimiter(line));
    const auto value = fields.size() >= 2 ? parse_integer(fields[1]) : std::nullopt;
    if (!value) {
      if (first) {
        first = false;
        continue;
      }
      fail(path, n, "expected 'user_id<TAB>display constraint'");
    }
    first = false;
    if (*value < 0 || *value > 1'000'000) fail(path, n, "display constraint out of range");
    dc.per_user[std::string(trim(fields[0]))] = static_cast<int>(*value);
  }
  return dc;
}

void write_display_constraints(std::ostream& out, const RecGraph& graph) {
  for (UserIndex u = 0; u < graph.user_count(); ++u) {
    out << graph.user(u).id << '\t' << graph.capacity(u) << '\n';
  }
}

CandidateLoad build_candidate_graph(const std::vector<CandidateRow>& rows, std::size_t top_n,
                                    const DisplayConstraints& constraints,
                                    const IdUniverse* universe) {
  RecGraph::Builder builder;
  CandidateLoad load;
  if (universe) {
    for (const auto& id : universe->users) builder.add_user(id, constraints.of(id));
    for (const auto& id : universe->items) builder.add_item(id);
  } else {
    for (const auto& row : rows) {
      if (!builder.find_user(row.user)) builder.add_user(row.user, constraints.of(row.user));
      if (!builder.find_item(row.item)) builder.add_item(row.item);
    }
  }

  std::vector<std::vector<std::size_t>> per_user(builder.user_count());
  std::vector<std::pair<UserIndex, ItemIndex>> ends(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto u = builder.find_user(rows[i].user);
    const auto v = builder.find_item(rows[i].item);
    if (!u || !v) {
      ++load.skipped_rows;
      continue;
    }
    ends[i] = {*u, *v};
    per_user[*u].push_back(i);
  }

  std::vector<bool> keep(rows.size(), false);
  for (auto& idx : per_user) {
    if (top_n > 0 && idx.size() > top_n) {
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return rows[a].relevance > rows[b].relevance;
      });
      idx.resize(top_n);
    }
    for (std::size_t i : idx) keep[i] = true;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (keep[i]) builder.add_edge(ends[i].first, ends[i].second, rows[i].relevance);
  }
  load.graph = std::move(builder).build();
  return load;
}

CandidateLoad load_candidates(const std::string& path, std::size_t top_n,
                              const DisplayConstraints& constraints,
                              const IdUniverse* universe) {
  return build_candidate_graph(read_candidates(path), top_n, constraints, universe);
}

IdUniverse universe_of(const RatingsDataset& ratings, const GroupingRows* user_rows,
                       const GroupingRows* item_rows) {
  IdUniverse u;
  std::unordered_set<std::string> users, items;
  auto add = [](std::vector<std::string>& list, std::unordered_set<std::string>& seen,
                const std::string& id) {
    if (seen.insert(id).second) list.push_back(id);
  };
  for (const auto& r : ratings.ratings) {
    add(u.users, users, r.user);
    add(u.items, items, r.item);
  }
  if (user_rows) {
    for (const auto& row : user_rows->rows) add(u.users, users, row.first);
  }
  if (item_rows) {
    for (const auto& row : item_rows->rows) add(u.items, items, row.first);
  }
  return u;
}

std::vector<Interaction> map_interactions(const RatingsDataset& data, const RecGraph& graph,
                                          std::size_t* skipped) {
  std::vector<Interaction> out;
  std::size_t missing = 0;
  for (const auto& r : data.ratings) {
    const auto u = graph.find_user(r.user);
    const auto v = graph.find_item(r.item);
    if (u && v) {
      out.push_back({*u, *v});
    } else {
      ++missing;
    }
  }
  if (skipped) *skipped = missing;
  return out;
}

TestRelevance test_relevance(const RatingsDataset& test, const RecGraph& graph,
                             double min_rating) {
  TestRelevance t;
  t.relevant.resize(graph.user_count());
  for (const auto& r : test.ratings) {
    const auto u = graph.find_user(r.user);
    if (!u) continue;
    auto& set = t.relevant[*u];
    if (!set) set.emplace();
    if (r.rating < min_rating) continue;
    if (const auto v = graph.find_item(r.item)) set->insert(*v);
  }
  return t;
}

void write_solution(std::ostream& out, const RecGraph& graph, const RankedLists& ranked,
                    const std::string& method) {
  out << "user_id\titem_id\trelevance\tmethod\n";
  for (std::size_t u = 0; u < ranked.lists.size(); ++u) {
    for (const auto& entry : ranked.lists[u]) {
      const auto& e = graph.edge(entry.edge);
      out << graph.user(e.user).id << '\t' << graph.item(e.item).id << '\t'
          << format_real(e.relevance) << '\t' << method << '\n';
    }
  }
}

void save_solution(const std::string& path, const RecGraph& graph, const RankedLists& ranked,
                   const std::string& method) {
  auto out = open_out(path);
  write_solution(out, graph, ranked, method);
  finish(out, path);
}

RankedLists read_solution(std::istream& in, const std::string& source, const RecGraph& graph) {
  RankedLists ranked;
  ranked.lists.resize(graph.user_count());
  std::unordered_set<EdgeIndex> seen;
  std::string raw;
  bool first = true;
  for (std::size_t n = 1; std::getline(in, raw); ++n) {
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const auto fields = split(line, "\t");
    if (first) {
      first = false;
      if (trim(fields[0]) == "user_id") continue;
    }
    if (fields.size() < 2) fail(source, n, "expected user_id and item_id");
    const std::string user(trim(fields[0]));
    const std::string item(trim(fields[1]));
    const auto u = graph.find_user(user);
    if (!u) fail(source, n, "unknown user '" + user + "'");
    const auto v = graph.find_item(item);
    if (!v) fail(source, n, "unknown item '" + item + "'");
    const auto e = graph.find_edge(*u, *v);
    if (!e) fail(source, n, "(" + user + ", " + item + ") is not a candidate edge");
    if (!seen.insert(*e).second) fail(source, n, "repeated recommendation");
    ranked.lists[*u].push_back({*e, graph.edge(*e).relevance});
  }
  return ranked;
}

RankedLists load_solution(const std::string& path, const RecGraph& graph) {
  auto in = open_in(path);
  return read_solution(in, path, graph);
}

void write_thresholds(std::ostream& out, const ThresholdTable& table, const RecGraph& graph,
                      const Grouping& user_types, const Grouping& item_categories) {
  for (UserIndex u = 0; u < table.user_category.entity_count(); ++u) {
    for (const auto& entry : table.user_category.row(u)) {
      out << "user\t" << graph.user(u).id << '\t' << item_categories.group_id(entry.group)
          << '\t' << entry.value << '\n';
    }
  }
  for (ItemIndex v = 0; v < table.item_type.entity_count(); ++v) {
    for (const auto& entry : table.item_type.row(v)) {
      out << "item\t" << graph.item(v).id << '\t' << user_types.group_id(entry.group) << '\t'
          << entry.value << '\n';
    }
  }
}

void save_thresholds(const std::string& path, const ThresholdTable& table,
                     const RecGraph& graph, const Grouping& user_types,
                     const Grouping& item_categories) {
  auto out = open_out(path);
  write_thresholds(out, table, graph, user_types, item_categories);
  finish(out, path);
}

ThresholdTable read_thresholds(std::istream& in, const std::string& source,
                               const RecGraph& graph, const Grouping& user_types,
                               const Grouping& item_categories) {
  ThresholdTable table(graph.user_count(), graph.item_count());
  std::string raw;
  for (std::size_t n = 1; std::getline(in, raw); ++n) {
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const auto fields = split(line, "\t");
    if (fields.size() != 4) fail(source, n, "expected 4 tab-separated fields");
    const auto kind = trim(fields[0]);
    const std::string id(trim(fields[1]));
    const std::string group(trim(fields[2]));
    const auto value = parse_integer(fields[3]);
    if (!value || *value < 0 || *value > 1'000'000) fail(source, n, "bad threshold value");
    if (kind == "user") {
      const auto u = graph.find_user(id);
      if (!u) fail(source, n, "unknown user '" + id + "'");
      const auto g = item_categories.find_group(group);
      if (!g) fail(source, n, "unknown category '" + group + "'");
      table.user_category.set(*u, *g, static_cast<int>(*value));
    } else if (kind == "item") {
      const auto v = graph.find_item(id);
      if (!v) fail(source, n, "unknown item '" + id + "'");
      const auto g = user_types.find_group(group);
      if (!g) fail(source, n, "unknown type '" + group + "'");
      table.item_type.set(*v, *g, static_cast<int>(*value));
    } else {
      fail(source, n, "first field must be 'user' or 'item'");
    }
  }
  return table;
}

ThresholdTable load_thresholds(const std::string& path, const RecGraph& graph,
                               const Grouping& user_types, const Grouping& item_categories) {
  auto in = open_in(path);
  return read_thresholds(in, path, graph, user_types, item_categories);
}

}  // namespace recdiv
