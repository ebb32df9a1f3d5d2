#pragma once

// Per-router softmax routing policy over outgoing links, one logit per
// (destination, outgoing link) pair.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "netpg/common.hpp"
#include "netpg/random.hpp"

namespace netpg {

inline constexpr double kProbabilityFloor = 1e-300;

// Row-major matrix indexed (destination row, outgoing-link slot). Rows exist
// only for destinations the router can be asked to route.
class ParamTable {
 public:
  ParamTable() = default;

  ParamTable(NodeId router, std::vector<NodeId> destinations, std::size_t slots, std::size_t node_count)
      : router_(router), destinations_(std::move(destinations)), slots_(slots), row_of_(node_count, kNoRow) {
    for (std::size_t r = 0; r < destinations_.size(); ++r) {
      if (destinations_[r].index() >= node_count) throw Error("ParamTable: destination outside the network");
      row_of_[destinations_[r].index()] = static_cast<std::int32_t>(r);
    }
    if (!destinations_.empty() && slots_ == 0) throw Error("ParamTable: a router with destinations needs a link");
    values_.assign(destinations_.size() * slots_, 0.0);
  }

  NodeId router() const { return router_; }
  std::size_t slots() const { return slots_; }
  std::size_t rows() const { return destinations_.size(); }
  const std::vector<NodeId>& destinations() const { return destinations_; }

  bool has_row(NodeId y) const { return y.index() < row_of_.size() && row_of_[y.index()] != kNoRow; }

  std::size_t row_index(NodeId y) const {
    if (!has_row(y)) throw Error("no parameter row for destination " + std::to_string(y.value));
    return static_cast<std::size_t>(row_of_[y.index()]);
  }

  std::span<double> row(NodeId y) { return {values_.data() + row_index(y) * slots_, slots_}; }
  std::span<const double> row(NodeId y) const { return {values_.data() + row_index(y) * slots_, slots_}; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool same_shape(const ParamTable& other) const {
    return slots_ == other.slots_ && destinations_ == other.destinations_;
  }

  friend bool operator==(const ParamTable&, const ParamTable&) = default;

 private:
  static constexpr std::int32_t kNoRow = -1;

  NodeId router_;
  std::vector<NodeId> destinations_;
  std::size_t slots_ = 0;
  std::vector<std::int32_t> row_of_;
  std::vector<double> values_;
};

struct ActionDistribution {
  std::vector<double> probs;
};

struct RoutingDecision {
  NodeId router;
  NodeId destination;
  std::size_t slot = 0;
  std::int64_t tick = 0;
};

// Softmax of `logits` into `out`, shifted by the row maximum.
inline void softmax_into(std::span<const double> logits, std::span<double> out) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t u = 0; u < logits.size(); ++u) {
    out[u] = std::exp(logits[u] - top);
    total += out[u];
  }
  for (double& p : out) p = std::max(p / total, kProbabilityFloor);
}

inline ActionDistribution action_probabilities(const ParamTable& p, NodeId y) {
  auto logits = p.row(y);
  ActionDistribution d;
  d.probs.resize(logits.size());
  softmax_into(logits, d.probs);
  return d;
}

// Consumes exactly one uniform draw from `rng`.
inline RoutingDecision sample_link(const ParamTable& p, NodeId y, RandomStream& rng, std::int64_t tick = 0) {
  ActionDistribution d = action_probabilities(p, y);
  return {p.router(), y, pick_index(d.probs, rng.uniform()), tick};
}

// grad ln mu_{u_t}(y) restricted to row y: indicator[u == u_t] - mu_u.
inline void log_policy_gradient_into(std::span<const double> probs, std::size_t chosen, std::span<double> out) {
  if (chosen >= probs.size()) throw Error("log_policy_gradient: slot out of range");
  for (std::size_t u = 0; u < probs.size(); ++u) out[u] = -probs[u];
  out[chosen] += 1.0;
}

inline std::vector<double> log_policy_gradient(const ParamTable& p, NodeId y, std::size_t chosen) {
  ActionDistribution d = action_probabilities(p, y);
  std::vector<double> g(d.probs.size());
  log_policy_gradient_into(d.probs, chosen, g);
  return g;
}

}  // namespace netpg
