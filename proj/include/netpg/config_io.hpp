#pragma once

// JSON encoding of ExperimentConfig and parameter snapshots.
//
// {
//   "name": "triangle",
//   "network": {"cost_model": "link_delay" | "node_flow",
//               "nodes": ["A", ...],
//               "links": [{"from": "A", "to": "B", "delay": 1, "capacity": null,
//                          "bidirectional": false}, ...],
//               "node_costs": {"C": {"base": 50, "per_flow": 1}, ...}},
//   "traffic": {"A": {"rate": 1, "destinations": {"B": 0.5, "C": 0.5} | "uniform"}, ...},
//   "learner": {"beta": 0.99, "gamma": 1e-5, "schedule": "constant",
//               "trace_timing": "post_decision" | "pre_decision"},
//   "shaping": {"cycle_penalty": 0, "history_length": 2, "drop_penalty": 0},
//   "run": {"steps": 1000000, "seed": 1, "sample_every": 100, "ma_window": 1000,
//           "per_tick": false,
//           "tracked": [{"router": "A", "destination": "C", "link_to": "B", "slot": 0}]},
//   "output": {"csv": "triangle.csv", "theta": "triangle_theta.json"}
// }

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "netpg/experiment_config.hpp"
#include "netpg/gibbs_policy.hpp"

namespace netpg {

using json = nlohmann::json;

class ConfigError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

[[noreturn]] inline void config_fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

inline const json& require(const json& obj, const std::string& where, const char* key) {
  if (!obj.is_object()) config_fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) config_fail(join_path(where, key), "missing");
  return *it;
}

template <typename T>
T read_as(const json& value, const std::string& where) {
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!value.is_number()) config_fail(where, "expected a number");
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!value.is_number_integer()) config_fail(where, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (value.is_number_integer() && !value.is_number_unsigned()) config_fail(where, "expected a non-negative integer");
      }
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!value.is_boolean()) config_fail(where, "expected true or false");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!value.is_string()) config_fail(where, "expected a string");
    }
    return value.get<T>();
  } catch (const json::exception& e) {
    config_fail(where, e.what());
  }
}

template <typename T>
T field(const json& obj, const std::string& where, const char* key) {
  return read_as<T>(require(obj, where, key), join_path(where, key));
}

template <typename T>
T field_or(const json& obj, const std::string& where, const char* key, T fallback) {
  if (!obj.is_object()) config_fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  return read_as<T>(*it, join_path(where, key));
}

inline NodeId node_ref(const Topology& t, const json& value, const std::string& where) {
  auto label = read_as<std::string>(value, where);
  if (auto id = t.find(label)) return *id;
  config_fail(where, "unknown node '" + label + "'");
}

inline Topology parse_network(const json& j) {
  const std::string where = "network";
  Topology t;
  auto model = field_or<std::string>(j, where, "cost_model", "link_delay");
  if (model == "link_delay") {
    t.cost_model = CostModel::LinkDelay;
  } else if (model == "node_flow") {
    t.cost_model = CostModel::NodeFlow;
  } else {
    config_fail(where + ".cost_model", "expected link_delay or node_flow");
  }

  const json& nodes = require(j, where, "nodes");
  if (!nodes.is_array()) config_fail(where + ".nodes", "expected an array of labels");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::string w = where + ".nodes[" + std::to_string(i) + "]";
    auto label = read_as<std::string>(nodes[i], w);
    if (t.find(label)) config_fail(w, "duplicate node label '" + label + "'");
    t.add_node(label);
  }

  const json& links = require(j, where, "links");
  if (!links.is_array()) config_fail(where + ".links", "expected an array");
  for (std::size_t i = 0; i < links.size(); ++i) {
    std::string w = where + ".links[" + std::to_string(i) + "]";
    const json& l = links[i];
    NodeId from = node_ref(t, require(l, w, "from"), w + ".from");
    NodeId to = node_ref(t, require(l, w, "to"), w + ".to");
    int delay = field<int>(l, w, "delay");
    if (delay < 1) config_fail(w + ".delay", "link delay must be a positive integer");
    Capacity capacity;
    if (auto it = l.find("capacity"); it != l.end() && !it->is_null()) {
      capacity = read_as<int>(*it, w + ".capacity");
      if (*capacity < 1) config_fail(w + ".capacity", "capacity must be at least 1 or null");
    }
    if (field_or<bool>(l, w, "bidirectional", false))
      t.add_duplex(from, to, delay, capacity);
    else
      t.add_link(from, to, delay, capacity);
  }

  if (auto it = j.find("node_costs"); it != j.end()) {
    if (!it->is_object()) config_fail(where + ".node_costs", "expected an object keyed by node label");
    for (const auto& [label, cost] : it->items()) {
      std::string w = where + ".node_costs." + label;
      NodeId n = node_ref(t, json(label), w);
      t.node_costs[n] = {field<double>(cost, w, "base"), field<double>(cost, w, "per_flow")};
    }
  }
  return t;
}

inline TrafficSpec parse_traffic(const json& j, const Topology& t) {
  const std::string where = "traffic";
  if (!j.is_object()) config_fail(where, "expected an object keyed by node label");
  TrafficSpec spec;
  spec.sources.assign(t.node_count(), NodeTraffic{0, std::vector<double>(t.node_count(), 0.0)});
  for (const auto& [label, entry] : j.items()) {
    std::string w = where + "." + label;
    NodeId s = node_ref(t, json(label), w);
    NodeTraffic& src = spec.sources[s.index()];
    src.rate = field<int>(entry, w, "rate");
    if (src.rate < 0) config_fail(w + ".rate", "rate must be non-negative");
    const json& dests = require(entry, w, "destinations");
    if (dests.is_string()) {
      if (dests.get<std::string>() != "uniform") config_fail(w + ".destinations", "expected \"uniform\" or an object");
      const std::size_t n = t.node_count();
      if (n < 2) config_fail(w + ".destinations", "uniform traffic needs at least two nodes");
      src.destinations.assign(n, 1.0 / static_cast<double>(n - 1));
      src.destinations[s.index()] = 0.0;
    } else if (dests.is_object()) {
      for (const auto& [dlabel, weight] : dests.items()) {
        std::string dw = w + ".destinations." + dlabel;
        NodeId y = node_ref(t, json(dlabel), dw);
        src.destinations[y.index()] = read_as<double>(weight, dw);
      }
    } else {
      config_fail(w + ".destinations", "expected \"uniform\" or an object");
    }
  }
  return spec;
}

inline std::size_t resolve_slot(const Topology& t, NodeId router, const json& entry, const std::string& where) {
  auto out = outgoing_links(t, router);
  std::optional<std::size_t> slot;
  if (auto it = entry.find("slot"); it != entry.end()) {
    slot = read_as<std::size_t>(*it, where + ".slot");
    if (*slot >= out.size()) config_fail(where + ".slot", "router has only " + std::to_string(out.size()) + " links");
  }
  if (auto it = entry.find("link_to"); it != entry.end()) {
    NodeId to = node_ref(t, *it, where + ".link_to");
    if (slot) {
      if (out[*slot].to != to) config_fail(where, "slot does not lead to link_to");
      return *slot;
    }
    std::optional<std::size_t> found;
    for (std::size_t u = 0; u < out.size(); ++u) {
      if (out[u].to != to) continue;
      if (found) config_fail(where, "several links lead to " + t.label(to) + "; give a slot");
      found = u;
    }
    if (!found) config_fail(where + ".link_to", "router has no link to " + t.label(to));
    return *found;
  }
  if (!slot) config_fail(where, "tracked probability needs link_to or slot");
  return *slot;
}

}  // namespace detail

inline ExperimentConfig config_from_json(const json& j) {
  using namespace detail;
  if (!j.is_object()) config_fail("config", "expected a JSON object");
  ExperimentConfig cfg;
  cfg.name = field_or<std::string>(j, "", "name", "");
  cfg.topology = parse_network(require(j, "", "network"));
  cfg.traffic = parse_traffic(require(j, "", "traffic"), cfg.topology);

  const json& learner = require(j, "", "learner");
  cfg.learner.beta = field<double>(learner, "learner", "beta");
  cfg.learner.gamma = field<double>(learner, "learner", "gamma");
  if (field_or<std::string>(learner, "learner", "schedule", "constant") != "constant")
    config_fail("learner.schedule", "only the constant schedule is supported");
  auto timing = field_or<std::string>(learner, "learner", "trace_timing", "post_decision");
  if (timing == "post_decision") {
    cfg.learner.timing = TraceTiming::PostDecision;
  } else if (timing == "pre_decision") {
    cfg.learner.timing = TraceTiming::PreDecision;
  } else {
    config_fail("learner.trace_timing", "expected post_decision or pre_decision");
  }

  if (auto it = j.find("shaping"); it != j.end()) {
    cfg.shaping.cycle_penalty = field_or<double>(*it, "shaping", "cycle_penalty", 0.0);
    cfg.shaping.history_length = field_or<int>(*it, "shaping", "history_length", 2);
    cfg.shaping.drop_penalty = field_or<double>(*it, "shaping", "drop_penalty", 0.0);
  }

  const json& run = require(j, "", "run");
  cfg.steps = field<std::int64_t>(run, "run", "steps");
  cfg.seed = field_or<std::uint64_t>(run, "run", "seed", 1);
  cfg.sample_every = field_or<int>(run, "run", "sample_every", 100);
  cfg.ma_window = field_or<int>(run, "run", "ma_window", 1000);
  cfg.per_tick = field_or<bool>(run, "run", "per_tick", false);
  if (auto it = run.find("tracked"); it != run.end()) {
    if (!it->is_array()) config_fail("run.tracked", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      std::string w = "run.tracked[" + std::to_string(i) + "]";
      const json& e = (*it)[i];
      TrackedProbability tp;
      tp.router = node_ref(cfg.topology, require(e, w, "router"), w + ".router");
      tp.destination = node_ref(cfg.topology, require(e, w, "destination"), w + ".destination");
      tp.slot = resolve_slot(cfg.topology, tp.router, e, w);
      cfg.tracked.push_back(tp);
    }
  }

  if (auto it = j.find("output"); it != j.end()) {
    cfg.output.csv = field_or<std::string>(*it, "output", "csv", "");
    cfg.output.theta = field_or<std::string>(*it, "output", "theta", "");
  }

  require_valid(cfg);
  return cfg;
}

inline json config_to_json(const ExperimentConfig& cfg) {
  const Topology& t = cfg.topology;
  auto label = [&](NodeId n) { return t.label(n); };

  json network;
  network["cost_model"] = t.cost_model == CostModel::LinkDelay ? "link_delay" : "node_flow";
  network["nodes"] = json::array();
  for (const Node& n : t.nodes) network["nodes"].push_back(n.label);
  network["links"] = json::array();
  for (const Link& l : t.links) {
    json jl{{"from", label(l.from)}, {"to", label(l.to)}, {"delay", l.delay}};
    jl["capacity"] = l.capacity ? json(*l.capacity) : json(nullptr);
    network["links"].push_back(jl);
  }
  if (!t.node_costs.empty()) {
    json costs = json::object();
    for (const auto& [n, c] : t.node_costs) costs[label(n)] = {{"base", c.base}, {"per_flow", c.per_flow}};
    network["node_costs"] = costs;
  }

  json traffic = json::object();
  for (std::size_t s = 0; s < cfg.traffic.sources.size(); ++s) {
    const NodeTraffic& src = cfg.traffic.sources[s];
    if (src.rate == 0) continue;
    json dests = json::object();
    for (std::size_t y = 0; y < src.destinations.size(); ++y)
      if (src.destinations[y] != 0.0) dests[t.nodes[y].label] = src.destinations[y];
    traffic[t.nodes[s].label] = {{"rate", src.rate}, {"destinations", dests}};
  }

  json tracked = json::array();
  for (const TrackedProbability& tp : cfg.tracked) {
    tracked.push_back({{"router", label(tp.router)},
                       {"destination", label(tp.destination)},
                       {"link_to", label(outgoing_links(t, tp.router).at(tp.slot).to)},
                       {"slot", tp.slot}});
  }

  json j;
  j["name"] = cfg.name;
  j["network"] = network;
  j["traffic"] = traffic;
  j["learner"] = {{"beta", cfg.learner.beta},
                  {"gamma", cfg.learner.gamma},
                  {"schedule", "constant"},
                  {"trace_timing", cfg.learner.timing == TraceTiming::PostDecision ? "post_decision" : "pre_decision"}};
  j["shaping"] = {{"cycle_penalty", cfg.shaping.cycle_penalty},
                  {"history_length", cfg.shaping.history_length},
                  {"drop_penalty", cfg.shaping.drop_penalty}};
  j["run"] = {{"steps", cfg.steps},           {"seed", cfg.seed},         {"sample_every", cfg.sample_every},
              {"ma_window", cfg.ma_window}, {"per_tick", cfg.per_tick}, {"tracked", tracked}};
  j["output"] = {{"csv", cfg.output.csv}, {"theta", cfg.output.theta}};
  return j;
}

inline ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>") {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const Error& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

inline void save_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(path + ": cannot write config file");
  out << config_to_json(cfg).dump(2) << '\n';
}

// router label -> destination label -> logits in slot order.
inline json theta_snapshot(const Topology& t, const std::vector<ParamTable>& tables) {
  json snap = json::object();
  for (const ParamTable& p : tables) {
    json rows = json::object();
    for (NodeId y : p.destinations()) {
      auto r = p.row(y);
      rows[t.label(y)] = std::vector<double>(r.begin(), r.end());
    }
    snap[t.label(p.router())] = rows;
  }
  return snap;
}

}  // namespace netpg
