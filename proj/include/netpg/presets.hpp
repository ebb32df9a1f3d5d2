#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "netpg/experiment_config.hpp"
#include "netpg/networks.hpp"

namespace netpg {

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"triangle", "contention", "six_node", "braess1"};
  return names;
}

inline ExperimentConfig preset(std::string_view name) {
  ExperimentConfig cfg;
  cfg.name = std::string(name);
  cfg.seed = 1;

  if (name == "triangle") {
    cfg.topology = triangle_network();
    cfg.traffic = uniform_traffic(cfg.topology, 1);
    cfg.learner = {0.99, 1e-5};
    cfg.steps = 1'000'000;
    // mu^A_{AB}(C)
    cfg.tracked = {{cfg.topology.at("A"), cfg.topology.at("C"), 0}};
  } else if (name == "contention") {
    cfg.topology = contention_network();
    cfg.traffic = single_flow_traffic(cfg.topology, cfg.topology.at("A"), cfg.topology.at("B"), 2);
    cfg.learner = {0.99, 1e-7};
    cfg.shaping.drop_penalty = 21.0;
    cfg.steps = 2'000'000;
    // mu^A_top(B)
    cfg.tracked = {{cfg.topology.at("A"), cfg.topology.at("B"), 0}};
  } else if (name == "six_node") {
    cfg.topology = six_node_network();
    cfg.traffic = uniform_traffic(cfg.topology, 1);
    cfg.learner = {0.9, 1e-6};
    cfg.shaping.cycle_penalty = -100.0;
    cfg.shaping.history_length = 2;
    cfg.steps = 4'000'000;
    // mu^A_{AB}(B), the direct link
    cfg.tracked = {{cfg.topology.at("A"), cfg.topology.at("B"), 0}};
  } else if (name == "braess1") {
    cfg.topology = braess1_network();
    cfg.traffic = single_flow_traffic(cfg.topology, cfg.topology.at("A"), cfg.topology.at("B"), 6);
    cfg.learner = {0.99, 1e-5};
    cfg.steps = 2'000'000;
    // mu^A_{AC}(B) and mu^E_{EF}(B)
    cfg.tracked = {{cfg.topology.at("A"), cfg.topology.at("B"), 0}, {cfg.topology.at("E"), cfg.topology.at("B"), 0}};
  } else {
    throw Error("unknown preset '" + std::string(name) + "' (expected triangle, contention, six_node or braess1)");
  }
  return cfg;
}

}  // namespace netpg
