#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "netpg/common.hpp"

namespace netpg {

// FIFO of the last `capacity` nodes a packet visited.
class VisitHistory {
 public:
  VisitHistory() = default;
  explicit VisitHistory(std::size_t capacity) : capacity_(capacity) {}

  bool contains(NodeId n) const { return std::find(nodes_.begin(), nodes_.end(), n) != nodes_.end(); }

  void push(NodeId n) {
    if (capacity_ == 0) return;
    if (nodes_.size() == capacity_) nodes_.erase(nodes_.begin());
    nodes_.push_back(n);
  }

  std::size_t capacity() const { return capacity_; }
  const std::vector<NodeId>& nodes() const { return nodes_; }

 private:
  std::size_t capacity_ = 2;
  std::vector<NodeId> nodes_;
};

struct Packet {
  std::uint64_t id = 0;
  NodeId source;
  NodeId destination;
  std::int64_t birth_tick = 0;
  VisitHistory history;
};

inline std::int64_t trip_time_of(const Packet& p, std::int64_t arrival_tick) { return arrival_tick - p.birth_tick; }

}  // namespace netpg
