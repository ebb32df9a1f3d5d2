#pragma once

// Shaping penalties added to the underlying reward: revisiting a node within
// the packet's recent history, and dropping a packet on a saturated link.

#include <cstdint>
#include <string>
#include <vector>

#include "netpg/packet.hpp"

namespace netpg {

struct ShapingConfig {
  double cycle_penalty = 0.0;  // per detected cycle, <= 0
  int history_length = 2;
  double drop_penalty = 0.0;  // subtracted per drop, >= 0

  friend bool operator==(const ShapingConfig&, const ShapingConfig&) = default;
};

inline std::vector<std::string> shaping_config_errors(const ShapingConfig& cfg) {
  std::vector<std::string> errors;
  if (cfg.history_length < 1) errors.push_back("history_length must be at least 1");
  if (!(cfg.cycle_penalty <= 0.0)) errors.push_back("cycle_penalty must be <= 0");
  if (!(cfg.drop_penalty >= 0.0)) errors.push_back("drop_penalty must be >= 0");
  return errors;
}

// True iff `arriving_at` is among the packet's last H visited nodes. The node
// is then appended to the history either way; the history is never reset.
inline bool detect_cycle(Packet& p, NodeId arriving_at) {
  const bool cycle = p.history.contains(arriving_at);
  p.history.push(arriving_at);
  return cycle;
}

inline double shaping_reward(std::int64_t cycles, std::int64_t drops, const ShapingConfig& cfg) {
  return static_cast<double>(cycles) * cfg.cycle_penalty - static_cast<double>(drops) * cfg.drop_penalty;
}

}  // namespace netpg
