#pragma once

// Network topologies, link properties, node cost functions and traffic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "netpg/common.hpp"

namespace netpg {

struct Node {
  NodeId id;
  std::string label;

  friend bool operator==(const Node&, const Node&) = default;
};

// Maximum number of packets that may be placed on a link in one tick.
// std::nullopt means unlimited.
using Capacity = std::optional<int>;

struct Link {
  NodeId from;
  NodeId to;
  int delay = 1;
  Capacity capacity;

  friend bool operator==(const Link&, const Link&) = default;
};

// Per-packet cost of passing through a node carrying x packets this tick.
struct NodeCost {
  double base = 0.0;
  double per_flow = 0.0;

  double operator()(double flow) const { return base + per_flow * flow; }

  friend bool operator==(const NodeCost&, const NodeCost&) = default;
};

enum class CostModel { LinkDelay, NodeFlow };

struct NodeTraffic {
  int rate = 0;                     // packets generated per tick
  std::vector<double> destinations;  // probability per node id

  friend bool operator==(const NodeTraffic&, const NodeTraffic&) = default;
};

struct TrafficSpec {
  std::vector<NodeTraffic> sources;  // indexed by node id

  friend bool operator==(const TrafficSpec&, const TrafficSpec&) = default;
};

struct Topology {
  std::vector<Node> nodes;
  std::vector<Link> links;
  std::map<NodeId, NodeCost> node_costs;
  CostModel cost_model = CostModel::LinkDelay;

  std::size_t node_count() const { return nodes.size(); }

  bool contains(NodeId n) const { return n.index() < nodes.size(); }

  const std::string& label(NodeId n) const {
    if (!contains(n)) throw Error("unknown node id " + std::to_string(n.value));
    return nodes[n.index()].label;
  }

  std::optional<NodeId> find(std::string_view label) const {
    for (const Node& n : nodes)
      if (n.label == label) return n.id;
    return std::nullopt;
  }

  NodeId at(std::string_view label) const {
    if (auto id = find(label)) return *id;
    throw Error("unknown node label '" + std::string(label) + "'");
  }

  NodeId add_node(std::string label) {
    NodeId id(static_cast<std::uint32_t>(nodes.size()));
    nodes.push_back({id, std::move(label)});
    return id;
  }

  void add_link(NodeId from, NodeId to, int delay, Capacity capacity = std::nullopt) {
    links.push_back({from, to, delay, capacity});
  }

  // Two directed links sharing one delay, declared from->to first.
  void add_duplex(NodeId a, NodeId b, int delay, Capacity capacity = std::nullopt) {
    add_link(a, b, delay, capacity);
    add_link(b, a, delay, capacity);
  }

  friend bool operator==(const Topology&, const Topology&) = default;
};

// Declaration indices of the links leaving n. This order is the slot order of
// every per-router parameter row, trace row and probability vector.
inline std::vector<std::size_t> outgoing_link_indices(const Topology& t, NodeId n) {
  if (!t.contains(n)) throw Error("unknown node id " + std::to_string(n.value));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < t.links.size(); ++i)
    if (t.links[i].from == n) out.push_back(i);
  return out;
}

inline std::vector<Link> outgoing_links(const Topology& t, NodeId n) {
  std::vector<Link> out;
  for (std::size_t i : outgoing_link_indices(t, n)) out.push_back(t.links[i]);
  return out;
}

// Minimal total link delay from -> to (Dijkstra).
inline std::int64_t shortest_path_delay(const Topology& t, NodeId from, NodeId to) {
  if (t.cost_model != CostModel::LinkDelay)
    throw Error("shortest_path_delay requires the link-delay cost model");
  if (!t.contains(from) || !t.contains(to)) throw Error("shortest_path_delay: unknown node");

  constexpr auto kInf = std::numeric_limits<std::int64_t>::max();
  std::vector<std::int64_t> dist(t.node_count(), kInf);
  using Entry = std::pair<std::int64_t, std::uint32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
  dist[from.index()] = 0;
  frontier.push({0, from.value});
  while (!frontier.empty()) {
    auto [d, n] = frontier.top();
    frontier.pop();
    if (d != dist[n]) continue;
    if (n == to.value) return d;
    for (const Link& l : t.links) {
      if (l.from.value != n) continue;
      std::int64_t nd = d + l.delay;
      if (nd < dist[l.to.index()]) {
        dist[l.to.index()] = nd;
        frontier.push({nd, l.to.value});
      }
    }
  }
  throw Error("shortest_path_delay: " + t.label(to) + " unreachable from " + t.label(from));
}

// Nodes a packet bound for `dest` can occupy after leaving `source` under any
// routing choice. The walk stops at `dest`; `dest` itself is not included.
inline std::vector<NodeId> nodes_visitable_en_route(const Topology& t, NodeId source, NodeId dest) {
  std::vector<char> seen(t.node_count(), 0);
  std::vector<NodeId> order;
  std::vector<NodeId> stack{source};
  seen[source.index()] = 1;
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    order.push_back(n);
    for (const Link& l : t.links) {
      if (l.from != n || !t.contains(l.to) || l.to == dest || seen[l.to.index()]) continue;
      seen[l.to.index()] = 1;
      stack.push_back(l.to);
    }
  }
  std::sort(order.begin(), order.end());
  return order;
}

inline bool reachable(const Topology& t, NodeId from, NodeId to) {
  if (from == to) return true;
  std::vector<char> seen(t.node_count(), 0);
  std::vector<NodeId> stack{from};
  seen[from.index()] = 1;
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    for (const Link& l : t.links) {
      if (l.from != n || !t.contains(l.to) || seen[l.to.index()]) continue;
      if (l.to == to) return true;
      seen[l.to.index()] = 1;
      stack.push_back(l.to);
    }
  }
  return false;
}

// Destinations for which router n may have to make a routing decision, in
// node-id order.
inline std::vector<NodeId> routable_destinations(const Topology& t, const TrafficSpec& traffic, NodeId n) {
  std::set<NodeId> dests;
  for (std::size_t s = 0; s < traffic.sources.size() && s < t.node_count(); ++s) {
    const NodeTraffic& src = traffic.sources[s];
    if (src.rate <= 0) continue;
    for (std::size_t y = 0; y < src.destinations.size() && y < t.node_count(); ++y) {
      if (src.destinations[y] <= 0.0 || y == s || NodeId(y) == n || dests.contains(NodeId(y))) continue;
      auto en_route = nodes_visitable_en_route(t, NodeId(static_cast<std::uint32_t>(s)), NodeId(y));
      if (std::binary_search(en_route.begin(), en_route.end(), n)) dests.insert(NodeId(y));
    }
  }
  return {dests.begin(), dests.end()};
}

enum class ViolationKind {
  BadNode,
  DanglingLink,
  SelfLoop,
  BadDelay,
  BadCapacity,
  MissingNodeCost,
  UnexpectedNodeCost,
  BadNodeCost,
  BadDistribution,
  NoOutgoingLinks,
  UnreachableDestination,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }

  bool has(ViolationKind kind) const {
    return std::any_of(violations.begin(), violations.end(),
                       [kind](const Violation& v) { return v.kind == kind; });
  }

  std::string summary() const {
    std::string s;
    for (const Violation& v : violations) {
      if (!s.empty()) s += "; ";
      s += v.message;
    }
    return s;
  }
};

inline ValidationReport validate_topology(const Topology& t, const TrafficSpec& traffic) {
  ValidationReport report;
  auto fail = [&](ViolationKind k, std::string msg) { report.violations.push_back({k, std::move(msg)}); };
  auto name = [&](NodeId n) { return t.contains(n) ? t.nodes[n.index()].label : "#" + std::to_string(n.value); };

  std::set<std::string> labels;
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    if (t.nodes[i].id.index() != i) fail(ViolationKind::BadNode, "node ids are not dense at index " + std::to_string(i));
    if (t.nodes[i].label.empty()) fail(ViolationKind::BadNode, "node " + std::to_string(i) + " has an empty label");
    if (!labels.insert(t.nodes[i].label).second)
      fail(ViolationKind::BadNode, "duplicate node label '" + t.nodes[i].label + "'");
  }

  bool links_ok = true;
  for (std::size_t i = 0; i < t.links.size(); ++i) {
    const Link& l = t.links[i];
    std::string where = "link " + std::to_string(i);
    if (!t.contains(l.from) || !t.contains(l.to)) {
      fail(ViolationKind::DanglingLink, where + " references an unknown node (dangling link)");
      links_ok = false;
      continue;
    }
    where += " (" + name(l.from) + "->" + name(l.to) + ")";
    if (l.from == l.to) fail(ViolationKind::SelfLoop, where + " is a self-loop");
    if (l.delay < 1) fail(ViolationKind::BadDelay, where + " has delay " + std::to_string(l.delay) + " < 1");
    if (l.capacity && *l.capacity < 1)
      fail(ViolationKind::BadCapacity, where + " has capacity " + std::to_string(*l.capacity) + " < 1");
  }

  if (t.cost_model == CostModel::NodeFlow) {
    for (const Node& n : t.nodes)
      if (!t.node_costs.contains(n.id)) fail(ViolationKind::MissingNodeCost, "missing node cost for node " + n.label);
    for (const auto& [id, c] : t.node_costs) {
      if (!t.contains(id)) fail(ViolationKind::BadNodeCost, "node cost for unknown node " + name(id));
      if (!(c.base >= 0.0) || !(c.per_flow >= 0.0) || !std::isfinite(c.base) || !std::isfinite(c.per_flow))
        fail(ViolationKind::BadNodeCost, "node cost for " + name(id) + " must have finite non-negative terms");
    }
  } else if (!t.node_costs.empty()) {
    fail(ViolationKind::UnexpectedNodeCost, "node costs are only allowed in the node-flow cost model");
  }

  if (traffic.sources.size() != t.node_count()) {
    fail(ViolationKind::BadDistribution, "traffic must list exactly one entry per node");
    return report;
  }
  for (std::size_t s = 0; s < traffic.sources.size(); ++s) {
    const NodeTraffic& src = traffic.sources[s];
    const std::string& label = t.nodes[s].label;
    if (src.rate < 0) fail(ViolationKind::BadDistribution, "node " + label + " has a negative traffic rate");
    if (src.rate == 0) continue;
    if (src.destinations.size() != t.node_count()) {
      fail(ViolationKind::BadDistribution, "node " + label + " destination distribution has the wrong length");
      continue;
    }
    double sum = 0.0;
    bool entries_ok = true;
    for (std::size_t y = 0; y < src.destinations.size(); ++y) {
      double w = src.destinations[y];
      if (!std::isfinite(w) || w < 0.0) entries_ok = false;
      if (y == s && w != 0.0) {
        fail(ViolationKind::BadDistribution, "node " + label + " sends traffic to itself");
        entries_ok = false;
      }
      sum += w;
    }
    if (!entries_ok || std::abs(sum - 1.0) > 1e-12) {
      fail(ViolationKind::BadDistribution, "node " + label + " destination distribution does not sum to 1");
      continue;
    }
    if (!links_ok) continue;

    for (std::size_t y = 0; y < src.destinations.size(); ++y) {
      if (src.destinations[y] <= 0.0) continue;
      NodeId source(static_cast<std::uint32_t>(s)), dest(static_cast<std::uint32_t>(y));
      for (NodeId n : nodes_visitable_en_route(t, source, dest)) {
        if (outgoing_link_indices(t, n).empty()) {
          fail(ViolationKind::NoOutgoingLinks, "node " + name(n) + " has no outgoing links but may hold traffic for " +
                                                   name(dest));
        } else if (!reachable(t, n, dest)) {
          fail(ViolationKind::UnreachableDestination,
               "unreachable destination " + name(dest) + " from node " + name(n) + " (traffic from " + label + ")");
        }
      }
    }
  }
  return report;
}

// Uniform destinations over every other node, `rate` packets per node per tick.
inline TrafficSpec uniform_traffic(const Topology& t, int rate) {
  TrafficSpec spec;
  const std::size_t n = t.node_count();
  for (std::size_t s = 0; s < n; ++s) {
    NodeTraffic src;
    src.rate = rate;
    src.destinations.assign(n, n > 1 ? 1.0 / static_cast<double>(n - 1) : 0.0);
    src.destinations[s] = 0.0;
    spec.sources.push_back(std::move(src));
  }
  return spec;
}

// A single source emitting `rate` packets per tick, all bound for `dest`.
inline TrafficSpec single_flow_traffic(const Topology& t, NodeId source, NodeId dest, int rate) {
  TrafficSpec spec;
  spec.sources.assign(t.node_count(), NodeTraffic{0, std::vector<double>(t.node_count(), 0.0)});
  spec.sources[source.index()].rate = rate;
  spec.sources[source.index()].destinations[dest.index()] = 1.0;
  return spec;
}

}  // namespace netpg
