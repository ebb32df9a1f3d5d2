#pragma once

// Declarative description of one simulation run.

#include <cstdint>
#include <string>
#include <vector>

#include "netpg/gibbs_policy.hpp"
#include "netpg/net_model.hpp"
#include "netpg/olpomdp.hpp"
#include "netpg/reward_shaping.hpp"

namespace netpg {

// mu^router_slot(destination), logged as a CSV column.
struct TrackedProbability {
  NodeId router;
  NodeId destination;
  std::size_t slot = 0;

  friend bool operator==(const TrackedProbability&, const TrackedProbability&) = default;
};

struct OutputConfig {
  std::string csv;    // metrics CSV path; empty disables
  std::string theta;  // final parameter snapshot (JSON); empty disables

  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct ExperimentConfig {
  std::string name;
  Topology topology;
  TrafficSpec traffic;
  LearnerConfig learner;
  ShapingConfig shaping;
  std::int64_t steps = 1;
  std::uint64_t seed = 1;
  std::vector<TrackedProbability> tracked;
  int ma_window = 1000;    // in emitted metric rows
  int sample_every = 100;  // ticks per metric row
  bool per_tick = false;   // overrides sample_every with 1
  OutputConfig output;

  int sampling_interval() const { return per_tick ? 1 : sample_every; }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Parameter tables at their initial (all-zero) values, one per node.
inline std::vector<ParamTable> initial_tables(const Topology& t, const TrafficSpec& traffic) {
  std::vector<ParamTable> tables;
  tables.reserve(t.node_count());
  for (const Node& n : t.nodes)
    tables.emplace_back(n.id, routable_destinations(t, traffic, n.id), outgoing_link_indices(t, n.id).size(),
                        t.node_count());
  return tables;
}

inline std::vector<std::string> experiment_config_errors(const ExperimentConfig& cfg) {
  std::vector<std::string> errors;
  ValidationReport report = validate_topology(cfg.topology, cfg.traffic);
  for (const Violation& v : report.violations) errors.push_back("network: " + v.message);
  for (auto& e : learner_config_errors(cfg.learner)) errors.push_back("learner: " + e);
  for (auto& e : shaping_config_errors(cfg.shaping)) errors.push_back("shaping: " + e);
  if (cfg.steps < 1) errors.push_back("run: steps must be at least 1");
  if (cfg.ma_window < 1) errors.push_back("run: ma_window must be at least 1");
  if (cfg.sample_every < 1) errors.push_back("run: sample_every must be at least 1");
  if (!report.ok()) return errors;

  for (std::size_t i = 0; i < cfg.tracked.size(); ++i) {
    const TrackedProbability& tp = cfg.tracked[i];
    std::string where = "run.tracked[" + std::to_string(i) + "]: ";
    if (!cfg.topology.contains(tp.router) || !cfg.topology.contains(tp.destination)) {
      errors.push_back(where + "unknown node");
      continue;
    }
    auto dests = routable_destinations(cfg.topology, cfg.traffic, tp.router);
    if (std::find(dests.begin(), dests.end(), tp.destination) == dests.end())
      errors.push_back(where + "router " + cfg.topology.label(tp.router) + " never routes packets for " +
                       cfg.topology.label(tp.destination));
    if (tp.slot >= outgoing_link_indices(cfg.topology, tp.router).size())
      errors.push_back(where + "link slot out of range");
  }
  return errors;
}

inline void require_valid(const ExperimentConfig& cfg) {
  auto errors = experiment_config_errors(cfg);
  if (errors.empty()) return;
  std::string msg = "invalid experiment config";
  for (const auto& e : errors) msg += "\n  " + e;
  throw Error(msg);
}

}  // namespace netpg
