#pragma once

// Exact reference values for the reference experiments: closed forms and
// full enumerations, no sampling.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "netpg/net_model.hpp"
#include "netpg/networks.hpp"

namespace netpg::oracles {

// Contention network, two packets per tick each taking the top link with
// probability p independently. Top: trip 1, capacity 1. Bottom: trip 6.
struct ContentionOutcome {
  int top_count = 0;
  double probability = 0.0;
  double reward = 0.0;
};

inline void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(std::string(what) + " must lie in [0, 1]");
}

inline std::array<ContentionOutcome, 3> contention_outcomes(double p, double d) {
  require_probability(p, "contention: p");
  return {{
      {0, (1 - p) * (1 - p), -12.0},
      {1, 2 * p * (1 - p), -7.0},
      {2, p * p, -1.0 - d},
  }};
}

// Expected reward per tick: (1 - d) p^2 + 10 p - 12.
inline double contention_expected_reward(double p, double d) {
  require_probability(p, "contention: p");
  return (1.0 - d) * p * p + 10.0 * p - 12.0;
}

inline double contention_optimal_p(double d) {
  if (!(d >= 0.0)) throw Error("contention: d must be non-negative");
  const double curvature = 1.0 - d;
  if (curvature >= 0.0)
    return contention_expected_reward(1.0, d) >= contention_expected_reward(0.0, d) ? 1.0 : 0.0;
  return std::clamp(-10.0 / (2.0 * curvature), 0.0, 1.0);
}

using Path = std::vector<NodeId>;

// Average per-packet cost when flows[k].second packets follow flows[k].first.
inline double braess_cost_for_flows(const Topology& t, const std::vector<std::pair<Path, std::int64_t>>& flows) {
  if (t.cost_model != CostModel::NodeFlow) throw Error("braess_cost_for_flows needs a node-flow network");
  std::vector<std::int64_t> node_flow(t.node_count(), 0);
  std::int64_t packets = 0;
  for (const auto& [path, count] : flows) {
    if (count < 0) throw Error("braess_cost_for_flows: negative flow");
    if (path.empty()) throw Error("braess_cost_for_flows: empty path");
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (!t.contains(path[i])) throw Error("braess_cost_for_flows: path has an unknown node");
      if (i > 0) {
        bool linked = std::any_of(t.links.begin(), t.links.end(),
                                  [&](const Link& l) { return l.from == path[i - 1] && l.to == path[i]; });
        if (!linked) throw Error("braess_cost_for_flows: path not in topology");
      }
      node_flow[path[i].index()] += count;
    }
    packets += count;
  }
  if (packets == 0) throw Error("braess_cost_for_flows: no packets");
  double total = 0.0;
  for (const auto& [path, count] : flows) {
    double per_packet = 0.0;
    for (NodeId n : path) per_packet += t.node_costs.at(n)(static_cast<double>(node_flow[n.index()]));
    total += per_packet * static_cast<double>(count);
  }
  return total / static_cast<double>(packets);
}

struct BraessPaths {
  Path left;    // A C D B
  Path right;   // A E F B
  Path bridge;  // A E G D B
};

inline BraessPaths braess_paths(const Topology& t) {
  auto n = [&](const char* label) { return t.at(label); };
  BraessPaths paths{{n("A"), n("C"), n("D"), n("B")}, {n("A"), n("E"), n("F"), n("B")}, {}};
  if (t.find("G")) paths.bridge = {n("A"), n("E"), n("G"), n("D"), n("B")};
  return paths;
}

inline double binomial_pmf(int n, int k, double p) {
  double coeff = 1.0;
  for (int i = 1; i <= k; ++i) coeff = coeff * (n - k + i) / i;
  return coeff * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

// Expected per-packet cost on the augmented Braess network when each of the
// six packets independently goes left with p_left and, if routed to E, takes
// E->F with p_ef.
inline double braess_expected_cost(double p_left, double p_ef, int packets = 6) {
  require_probability(p_left, "braess: p_left");
  require_probability(p_ef, "braess: p_ef");
  const Topology t = braess1_network();
  const BraessPaths paths = braess_paths(t);
  double expected = 0.0;
  for (int left = 0; left <= packets; ++left) {
    const double p_l = binomial_pmf(packets, left, p_left);
    if (p_l == 0.0) continue;
    for (int via_f = 0; via_f <= packets - left; ++via_f) {
      const double p_f = binomial_pmf(packets - left, via_f, p_ef);
      if (p_f == 0.0) continue;
      const int via_g = packets - left - via_f;
      expected += p_l * p_f * braess_cost_for_flows(t, {{paths.left, left}, {paths.right, via_f}, {paths.bridge, via_g}});
    }
  }
  return expected;
}

// Best achievable long-run reward per tick in an uncapacitated link-delay
// network: every packet takes a shortest path.
inline double optimal_average_reward(const Topology& t, const TrafficSpec& traffic) {
  double reward = 0.0;
  for (std::size_t s = 0; s < traffic.sources.size(); ++s) {
    const NodeTraffic& src = traffic.sources[s];
    if (src.rate == 0) continue;
    double expected_trip = 0.0;
    for (std::size_t y = 0; y < src.destinations.size(); ++y) {
      if (src.destinations[y] <= 0.0) continue;
      expected_trip += src.destinations[y] *
                       static_cast<double>(shortest_path_delay(t, NodeId(static_cast<std::uint32_t>(s)),
                                                               NodeId(static_cast<std::uint32_t>(y))));
    }
    reward -= src.rate * expected_trip;
  }
  return reward;
}

inline double triangle_optimal_average_reward(int ac_delay = 3) {
  const Topology t = triangle_network(ac_delay);
  return optimal_average_reward(t, uniform_traffic(t, 1));
}

}  // namespace netpg::oracles
