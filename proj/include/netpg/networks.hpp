#pragma once

// The four reference networks: the triangle, the two-link contention
// network, the complete six-node network and the two Braess node-cost
// networks.

#include "netpg/net_model.hpp"

namespace netpg {

// A-B and B-C delay 1, A-C delay `ac_delay`; every link duplex.
inline Topology triangle_network(int ac_delay = 3) {
  Topology t;
  NodeId a = t.add_node("A"), b = t.add_node("B"), c = t.add_node("C");
  t.add_duplex(a, b, 1);
  t.add_duplex(b, c, 1);
  t.add_duplex(a, c, ac_delay);
  return t;
}

// Two one-way links A->B: slot 0 ("top") delay 1 capacity 1, slot 1
// ("bottom") delay 6 capacity 2.
inline Topology contention_network() {
  Topology t;
  NodeId a = t.add_node("A"), b = t.add_node("B");
  t.add_link(a, b, 1, 1);
  t.add_link(a, b, 6, 2);
  return t;
}

// Complete graph on A..F, every link duplex with delay 1 and unlimited
// capacity.
inline Topology six_node_network() {
  Topology t;
  for (const char* label : {"A", "B", "C", "D", "E", "F"}) t.add_node(label);
  for (std::uint32_t i = 0; i < 6; ++i)
    for (std::uint32_t j = i + 1; j < 6; ++j) t.add_duplex(NodeId(i), NodeId(j), 1);
  return t;
}

// Paths ACDB and AEFB. Costs: C = 50 + x, D = 10x, E = 10x, F = 50 + x.
inline Topology braess0_network() {
  Topology t;
  t.cost_model = CostModel::NodeFlow;
  NodeId a = t.add_node("A"), b = t.add_node("B"), c = t.add_node("C"), d = t.add_node("D"), e = t.add_node("E"),
         f = t.add_node("F");
  t.add_link(a, c, 1);
  t.add_link(a, e, 1);
  t.add_link(c, d, 1);
  t.add_link(d, b, 1);
  t.add_link(e, f, 1);
  t.add_link(f, b, 1);
  t.node_costs = {{a, {0, 0}}, {b, {0, 0}}, {c, {50, 1}}, {d, {0, 10}}, {e, {0, 10}}, {f, {50, 1}}};
  return t;
}

// braess0 plus node G = 10 + x and links E->G, G->D. E's slots are
// [E->F, E->G].
inline Topology braess1_network() {
  Topology t = braess0_network();
  NodeId g = t.add_node("G");
  t.add_link(t.at("E"), g, 1);
  t.add_link(g, t.at("D"), 1);
  t.node_costs[g] = {10, 1};
  return t;
}

}  // namespace netpg
