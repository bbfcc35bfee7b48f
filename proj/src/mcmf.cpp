#include "recdiv/mcmf.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <utility>

#include "recdiv/error.hpp"

namespace recdiv {

FlowNode FlowNetwork::add_node(std::int64_t supply) {
  supply_.push_back(supply);
  return static_cast<FlowNode>(supply_.size() - 1);
}

FlowArcIndex FlowNetwork::add_arc(FlowNode tail, FlowNode head, std::int64_t capacity,
                                  std::int64_t cost) {
  arcs_.push_back({tail, head, capacity, cost});
  return static_cast<FlowArcIndex>(arcs_.size() - 1);
}

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

// Residual graph. Arc 2i is the forward copy of arc i, 2i+1 its reverse.
class ResidualGraph {
 public:
  explicit ResidualGraph(const FlowNetwork& net) : n_(static_cast<FlowNode>(net.node_count())) {
    head_.reserve(2 * net.arc_count());
    for (const auto& a : net.arcs()) add(a.tail, a.head, a.capacity, a.cost);
    // CSR of residual arcs by tail.
    off_.assign(n_ + 1, 0);
    for (std::size_t r = 0; r < head_.size(); ++r) ++off_[tail(r) + 1];
    for (FlowNode v = 0; v < n_; ++v) off_[v + 1] += off_[v];
    adj_.assign(head_.size(), 0);
    std::vector<std::size_t> cursor(off_.begin(), off_.end() - 1);
    for (std::size_t r = 0; r < head_.size(); ++r) {
      adj_[cursor[tail(r)]++] = static_cast<std::int32_t>(r);
    }
  }

  FlowNode n() const { return n_; }

  FlowNode head(std::size_t r) const { return head_[r]; }
  FlowNode tail(std::size_t r) const { return head_[r ^ 1]; }
  std::int64_t residual(std::size_t r) const { return residual_[r]; }
  std::int64_t cost(std::size_t r) const { return cost_[r]; }
  void push(std::size_t r, std::int64_t amount) {
    residual_[r] -= amount;
    residual_[r ^ 1] += amount;
  }
  std::span<const std::int32_t> out(FlowNode v) const {
    return {adj_.data() + off_[v], off_[v + 1] - off_[v]};
  }

 private:
  void add(FlowNode t, FlowNode h, std::int64_t cap, std::int64_t cost) {
    head_.push_back(h);
    residual_.push_back(cap);
    cost_.push_back(cost);
    head_.push_back(t);
    residual_.push_back(0);
    cost_.push_back(-cost);
  }

  FlowNode n_;
  std::vector<FlowNode> head_;
  std::vector<std::int64_t> residual_;
  std::vector<std::int64_t> cost_;
  std::vector<std::size_t> off_;
  std::vector<std::int32_t> adj_;
};

void check_network(const FlowNetwork& net) {
  const auto n = static_cast<FlowNode>(net.node_count());
  if (net.arc_count() > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max() / 2 - n)) {
    throw FlowError("network has too many arcs");
  }
  for (const auto& a : net.arcs()) {
    if (a.tail < 0 || a.tail >= n || a.head < 0 || a.head >= n) {
      throw FlowError("arc references an unknown node");
    }
    if (a.capacity < 0 || a.capacity > kUnboundedCapacity) {
      throw FlowError("arc capacity out of range");
    }
  }
  std::int64_t total = 0;
  for (auto s : net.supplies()) total += s;
  if (total != 0) throw FlowError("node supplies do not sum to zero");
}

// Label-correcting shortest paths from a virtual root joined to every node
// with a zero-cost arc, over residual arcs with positive capacity. Produces
// potentials with nonnegative reduced costs or detects a negative cycle.
std::vector<std::int64_t> initial_potentials(const ResidualGraph& g) {
  const FlowNode n = g.n();
  std::vector<std::int64_t> dist(n, 0);
  std::vector<std::int32_t> hops(n, 0);
  std::vector<std::uint8_t> queued(n, 1);
  std::deque<FlowNode> queue;
  for (FlowNode v = 0; v < n; ++v) queue.push_back(v);
  while (!queue.empty()) {
    const FlowNode v = queue.front();
    queue.pop_front();
    queued[v] = 0;
    for (auto r : g.out(v)) {
      if (g.residual(r) <= 0) continue;
      const FlowNode w = g.head(r);
      const std::int64_t nd = dist[v] + g.cost(r);
      if (nd < dist[w]) {
        dist[w] = nd;
        hops[w] = hops[v] + 1;
        if (hops[w] >= n) throw NegativeCycleError("network contains a negative-cost cycle");
        if (!queued[w]) {
          queued[w] = 1;
          queue.push_back(w);
        }
      }
    }
  }
  return dist;
}

// Successive shortest paths on a pseudoflow: each round runs Dijkstra on
// reduced costs from one node with excess and stops at the first node with
// remaining demand it settles, then pushes the path bottleneck. Searches
// stay local, so rounds cost about the size of the explored neighbourhood
// rather than the whole network.
class Solver {
 public:
  explicit Solver(const FlowNetwork& net)
      : g_(net), excess_(net.supplies().begin(), net.supplies().end()) {}

  FlowResult run(const FlowNetwork& net) {
    potential_ = initial_potentials(g_);
    const FlowNode n = g_.n();
    dist_.assign(n, kInf);
    parent_.assign(n, -1);
    settled_.assign(n, 0);

    FlowResult result;
    bool stuck = false;
    for (FlowNode s = 0; s < n; ++s) {
      while (excess_[s] > 0) {
        const FlowNode t = shortest_path(s);
        if (t < 0) {
          stuck = true;
          break;
        }
        ++result.shortest_path_rounds;
        ++result.augmentations;
        augment(s, t);
      }
    }

    result.feasible = !stuck;
    result.flow.resize(net.arc_count());
    for (std::size_t a = 0; a < net.arc_count(); ++a) {
      result.flow[a] = g_.residual(2 * a + 1);
      result.total_cost += result.flow[a] * net.arc(a).cost;
    }
    result.potential = potential_;
    return result;
  }

 private:
  std::int64_t reduced(std::size_t r) const {
    return g_.cost(r) + potential_[g_.tail(r)] - potential_[g_.head(r)];
  }

  // Returns the nearest node with negative excess, or -1 if none is
  // reachable. Settled nodes v get potential += dist(v) - dist(t), which is
  // the usual min(dist, dist(t)) update shifted by a constant, so untouched
  // nodes keep their potentials and every residual reduced cost stays
  // nonnegative.
  FlowNode shortest_path(FlowNode s) {
    using Entry = std::pair<std::int64_t, FlowNode>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    dist_[s] = 0;
    touched_.push_back(s);
    heap.emplace(0, s);
    FlowNode target = -1;
    while (!heap.empty()) {
      auto [d, v] = heap.top();
      heap.pop();
      if (settled_[v] || d != dist_[v]) continue;
      settled_[v] = 1;
      order_.push_back(v);
      if (excess_[v] < 0) {
        target = v;
        break;
      }
      for (auto r : g_.out(v)) {
        if (g_.residual(r) <= 0) continue;
        const FlowNode w = g_.head(r);
        const std::int64_t nd = d + reduced(r);
        if (nd < dist_[w]) {
          if (dist_[w] == kInf) touched_.push_back(w);
          dist_[w] = nd;
          parent_[w] = r;
          heap.emplace(nd, w);
        }
      }
    }
    if (target >= 0) {
      const std::int64_t bound = dist_[target];
      for (FlowNode v : order_) potential_[v] += dist_[v] - bound;
    }
    for (FlowNode v : touched_) {
      dist_[v] = kInf;
      settled_[v] = 0;
    }
    touched_.clear();
    order_.clear();
    return target;
  }

  void augment(FlowNode s, FlowNode t) {
    std::int64_t amount = std::min(excess_[s], -excess_[t]);
    for (FlowNode v = t; v != s; v = g_.tail(parent_[v])) {
      amount = std::min(amount, g_.residual(parent_[v]));
    }
    for (FlowNode v = t; v != s; v = g_.tail(parent_[v])) g_.push(parent_[v], amount);
    excess_[s] -= amount;
    excess_[t] += amount;
  }

  ResidualGraph g_;
  std::vector<std::int64_t> excess_;
  std::vector<std::int64_t> potential_;
  std::vector<std::int64_t> dist_;
  std::vector<std::int32_t> parent_;
  std::vector<std::uint8_t> settled_;
  std::vector<FlowNode> touched_;
  std::vector<FlowNode> order_;
};

}  // namespace

FlowResult solve_min_cost_flow(const FlowNetwork& net) {
  check_network(net);
  Solver solver(net);
  return solver.run(net);
}

bool validate_flow(const FlowNetwork& net, const FlowResult& result) {
  if (result.flow.size() != net.arc_count()) return false;
  std::vector<std::int64_t> balance(net.node_count(), 0);
  for (std::size_t a = 0; a < net.arc_count(); ++a) {
    const auto& arc = net.arc(static_cast<FlowArcIndex>(a));
    const auto f = result.flow[a];
    if (f < 0 || f > arc.capacity) return false;
    balance[arc.head] += f;
    balance[arc.tail] -= f;
  }
  for (std::size_t v = 0; v < net.node_count(); ++v) {
    if (balance[v] != -net.supply(static_cast<FlowNode>(v))) return false;
  }
  return true;
}

void write_dimacs(std::ostream& out, const FlowNetwork& net) {
  out << "c min-cost flow network\n";
  out << "p min " << net.node_count() << ' ' << net.arc_count() << '\n';
  for (std::size_t v = 0; v < net.node_count(); ++v) {
    const auto s = net.supply(static_cast<FlowNode>(v));
    if (s != 0) out << "n " << v + 1 << ' ' << s << '\n';
  }
  for (const auto& a : net.arcs()) {
    out << "a " << a.tail + 1 << ' ' << a.head + 1 << " 0 " << a.capacity << ' ' << a.cost
        << '\n';
  }
}

FlowNetwork read_dimacs(std::istream& in) {
  FlowNetwork net;
  bool have_problem = false;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw DataError("dimacs line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream fields(line);
    char tag = 0;
    fields >> tag;
    if (tag == 'p') {
      std::string kind;
      std::size_t nodes = 0, arcs = 0;
      if (!(fields >> kind >> nodes >> arcs) || kind != "min") fail("bad problem line");
      net = FlowNetwork(nodes);
      have_problem = true;
    } else if (tag == 'n') {
      long long id = 0, supply = 0;
      if (!have_problem || !(fields >> id >> supply)) fail("bad node line");
      if (id < 1 || static_cast<std::size_t>(id) > net.node_count()) fail("node out of range");
      net.set_supply(static_cast<FlowNode>(id - 1), supply);
    } else if (tag == 'a') {
      long long t = 0, h = 0, low = 0, cap = 0, cost = 0;
      if (!have_problem || !(fields >> t >> h >> low >> cap >> cost)) fail("bad arc line");
      if (low != 0) fail("nonzero lower bounds are not supported");
      if (t < 1 || h < 1 || static_cast<std::size_t>(t) > net.node_count() ||
          static_cast<std::size_t>(h) > net.node_count()) {
        fail("arc endpoint out of range");
      }
      net.add_arc(static_cast<FlowNode>(t - 1), static_cast<FlowNode>(h - 1), cap, cost);
    } else {
      fail("unknown record");
    }
  }
  if (!have_problem) throw DataError("dimacs input has no problem line");
  return net;
}

}  // namespace recdiv
