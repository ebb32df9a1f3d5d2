#pragma once

// Discrete-time packet network simulation with one learning router per node.
//
// Link-delay mode, per tick t:
//   1. advance in-transit packets and collect the ones arriving at t
//   2. deliver arrivals at their destination; underlying reward -= t - birth
//   3. generate new traffic
//   4. route every packet needing a decision in (node, packet id) order:
//      cycle check for transiting packets, sample a link, place it subject to
//      the link's per-tick capacity (excess placements are dropped)
//   5. fold decisions into traces and apply the tick reward
//
// Node-flow mode walks every packet generated this tick along a full path,
// then charges each packet the node costs along its path evaluated at the
// tick's node flows.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netpg/experiment_config.hpp"
#include "netpg/gibbs_policy.hpp"
#include "netpg/net_model.hpp"
#include "netpg/olpomdp.hpp"
#include "netpg/packet.hpp"
#include "netpg/random.hpp"
#include "netpg/reward_shaping.hpp"

namespace netpg {

struct InTransit {
  Packet packet;
  std::size_t link = 0;  // declaration index
  std::int64_t arrival_tick = 0;

  std::int64_t remaining(std::int64_t now) const { return arrival_tick - now; }
};

struct TickReward {
  double underlying = 0.0;
  double shaping = 0.0;
  double total = 0.0;
};

struct TickStats {
  std::int64_t tick = 0;
  std::int64_t generated = 0;
  std::int64_t delivered = 0;
  std::int64_t dropped = 0;
  std::int64_t cycles_detected = 0;
  std::int64_t in_flight = 0;
  TickReward reward;
};

struct CumulativeStats {
  std::int64_t generated = 0;
  std::int64_t delivered = 0;
  std::int64_t dropped = 0;
  std::int64_t cycles_detected = 0;
  double underlying_reward = 0.0;
  double shaping_reward = 0.0;

  friend bool operator==(const CumulativeStats&, const CumulativeStats&) = default;
};

class Simulator {
 public:
  using DeliveryListener = std::function<void(const Packet&, std::int64_t arrival_tick)>;

  explicit Simulator(ExperimentConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.seed) {
    ValidationReport report = validate_topology(cfg_.topology, cfg_.traffic);
    if (!report.ok()) throw Error("invalid network: " + report.summary());
    auto errors = learner_config_errors(cfg_.learner);
    for (auto& e : shaping_config_errors(cfg_.shaping)) errors.push_back(e);
    if (!errors.empty()) throw Error("invalid experiment config: " + errors.front());

    const Topology& t = cfg_.topology;
    tables_ = initial_tables(t, cfg_.traffic);
    for (const ParamTable& p : tables_) {
      traces_.emplace_back(p);
      pending_.push_back(p);
    }
    outgoing_.reserve(t.node_count());
    for (const Node& n : t.nodes) outgoing_.push_back(outgoing_link_indices(t, n.id));

    int max_delay = 1;
    for (const Link& l : t.links) max_delay = std::max(max_delay, l.delay);
    wheel_.resize(static_cast<std::size_t>(max_delay) + 1);
    placed_.assign(t.links.size(), 0);
    flows_.assign(t.node_count(), 0);
  }

  const ExperimentConfig& config() const { return cfg_; }
  std::int64_t ticks_done() const { return tick_; }
  const std::vector<ParamTable>& tables() const { return tables_; }
  const ParamTable& table(NodeId n) const { return tables_.at(n.index()); }
  const std::vector<EligibilityTrace>& traces() const { return traces_; }
  const CumulativeStats& cumulative() const { return cumulative_; }
  const RunningAverageReward& running_average() const { return average_; }
  std::int64_t in_flight() const { return in_flight_; }

  // Mutable access for tests that pin a policy by hand.
  ParamTable& mutable_table(NodeId n) { return tables_.at(n.index()); }

  void set_delivery_listener(DeliveryListener listener) { on_delivery_ = std::move(listener); }

  double probability(const TrackedProbability& tp) const {
    const ParamTable& p = table(tp.router);
    auto d = action_probabilities(p, tp.destination);
    if (tp.slot >= d.probs.size()) throw Error("tracked probability: slot out of range");
    return d.probs[tp.slot];
  }

  template <typename Visitor>
  void for_each_in_transit(Visitor&& visit) const {
    for (const auto& bucket : wheel_)
      for (const InTransit& it : bucket) visit(it);
  }

  TickStats tick() {
    return cfg_.topology.cost_model == CostModel::LinkDelay ? tick_link_delay() : tick_node_flow();
  }

  TickStats tick_link_delay() {
    if (cfg_.topology.cost_model != CostModel::LinkDelay) throw Error("tick_link_delay on a node-flow network");
    const Topology& topo = cfg_.topology;
    const std::int64_t now = tick_;
    TickStats stats;
    stats.tick = now;

    // 1-2. arrivals and deliveries
    auto& bucket = wheel_[static_cast<std::size_t>(now % static_cast<std::int64_t>(wheel_.size()))];
    routing_.clear();
    for (InTransit& it : bucket) {
      if (it.arrival_tick != now) throw Error("internal: packet in the wrong timing-wheel slot");
      --in_flight_;
      const NodeId at = topo.links[it.link].to;
      if (at == it.packet.destination) {
        ++stats.delivered;
        stats.reward.underlying -= static_cast<double>(trip_time_of(it.packet, now));
        if (on_delivery_) on_delivery_(it.packet, now);
      } else {
        routing_.push_back({std::move(it.packet), at, true});
      }
    }
    bucket.clear();

    // 3. new traffic
    generate(now, stats);

    // 4. routing
    std::sort(routing_.begin(), routing_.end(), [](const Waiting& a, const Waiting& b) {
      return a.node != b.node ? a.node < b.node : a.packet.id < b.packet.id;
    });
    std::fill(placed_.begin(), placed_.end(), 0);
    for (Waiting& w : routing_) {
      if (w.transiting && detect_cycle(w.packet, w.node)) ++stats.cycles_detected;
      const std::size_t link_index = decide(w.node, w.packet.destination);
      const Link& link = topo.links[link_index];
      if (link.capacity && placed_[link_index] >= *link.capacity) {
        ++stats.dropped;
        continue;
      }
      ++placed_[link_index];
      const std::int64_t arrival = now + link.delay;
      wheel_[static_cast<std::size_t>(arrival % static_cast<std::int64_t>(wheel_.size()))].push_back(
          {std::move(w.packet), link_index, arrival});
      ++in_flight_;
    }

    return finish_tick(stats);
  }

  TickStats tick_node_flow() {
    if (cfg_.topology.cost_model != CostModel::NodeFlow) throw Error("tick_node_flow on a link-delay network");
    const Topology& topo = cfg_.topology;
    const std::int64_t now = tick_;
    TickStats stats;
    stats.tick = now;

    routing_.clear();
    generate(now, stats);

    std::fill(flows_.begin(), flows_.end(), 0);
    paths_.resize(routing_.size());
    for (std::size_t i = 0; i < routing_.size(); ++i) {
      Packet& p = routing_[i].packet;
      auto& path = paths_[i];
      path.assign(1, p.source);
      NodeId at = p.source;
      while (at != p.destination) {
        if (path.size() > topo.node_count())
          throw Error("node-flow path from " + topo.label(p.source) + " exceeds the node count; the network has a cycle");
        at = topo.links[decide(at, p.destination)].to;
        if (detect_cycle(p, at)) ++stats.cycles_detected;
        path.push_back(at);
      }
      for (NodeId n : path) ++flows_[n.index()];
    }
    for (std::size_t i = 0; i < routing_.size(); ++i) {
      double cost = 0.0;
      for (NodeId n : paths_[i]) cost += topo.node_costs.at(n)(static_cast<double>(flows_[n.index()]));
      stats.reward.underlying -= cost;
      ++stats.delivered;
      if (on_delivery_) on_delivery_(routing_[i].packet, now);
    }
    return finish_tick(stats);
  }

 private:
  struct Waiting {
    Packet packet;
    NodeId node;
    bool transiting = false;
  };

  void generate(std::int64_t now, TickStats& stats) {
    const Topology& topo = cfg_.topology;
    const std::size_t history = static_cast<std::size_t>(cfg_.shaping.history_length);
    for (std::size_t s = 0; s < topo.node_count(); ++s) {
      const NodeTraffic& src = cfg_.traffic.sources[s];
      for (int k = 0; k < src.rate; ++k) {
        Packet p;
        p.id = next_packet_id_++;
        p.source = NodeId(static_cast<std::uint32_t>(s));
        p.destination = NodeId(static_cast<std::uint32_t>(pick_index(src.destinations, rng_.uniform())));
        p.birth_tick = now;
        p.history = VisitHistory(history);
        p.history.push(p.source);
        routing_.push_back({std::move(p), NodeId(static_cast<std::uint32_t>(s)), false});
        ++stats.generated;
      }
    }
  }

  // Samples an outgoing link at `router` for a packet bound to `dest` and
  // records the decision's log-policy gradient. Returns the link index.
  std::size_t decide(NodeId router, NodeId dest) {
    const ParamTable& p = tables_[router.index()];
    auto logits = p.row(dest);
    probs_.resize(logits.size());
    softmax_into(logits, probs_);
    const std::size_t slot = pick_index(probs_, rng_.uniform());
    auto g = pending_[router.index()].row(dest);
    for (std::size_t u = 0; u < g.size(); ++u) g[u] -= probs_[u];
    g[slot] += 1.0;
    return outgoing_[router.index()][slot];
  }

  TickStats finish_tick(TickStats& stats) {
    stats.reward.shaping = shaping_reward(stats.cycles_detected, stats.dropped, cfg_.shaping);
    stats.reward.total = stats.reward.underlying + stats.reward.shaping;
    const double r = stats.reward.total;

    for (std::size_t i = 0; i < tables_.size(); ++i) {
      if (tables_[i].rows() == 0) continue;
      if (cfg_.learner.timing == TraceTiming::PostDecision) {
        fold_decisions(traces_[i], cfg_.learner, pending_[i]);
        apply_reward(tables_[i], traces_[i], cfg_.learner, r);
      } else {
        apply_reward(tables_[i], traces_[i], cfg_.learner, r);
        fold_decisions(traces_[i], cfg_.learner, pending_[i]);
      }
      for (double& v : pending_[i].values()) v = 0.0;
    }

    cumulative_.generated += stats.generated;
    cumulative_.delivered += stats.delivered;
    cumulative_.dropped += stats.dropped;
    cumulative_.cycles_detected += stats.cycles_detected;
    cumulative_.underlying_reward += stats.reward.underlying;
    cumulative_.shaping_reward += stats.reward.shaping;
    stats.in_flight = in_flight_;
    if (cumulative_.generated != cumulative_.delivered + cumulative_.dropped + in_flight_)
      throw Error("internal: packet conservation violated at tick " + std::to_string(stats.tick));

    average_.observe(r);
    ++tick_;
    return stats;
  }

  ExperimentConfig cfg_;
  RandomStream rng_;
  std::vector<ParamTable> tables_;
  std::vector<EligibilityTrace> traces_;
  std::vector<ParamTable> pending_;
  std::vector<std::vector<std::size_t>> outgoing_;

  std::vector<std::vector<InTransit>> wheel_;
  std::vector<int> placed_;
  std::vector<std::int64_t> flows_;
  std::vector<Waiting> routing_;
  std::vector<std::vector<NodeId>> paths_;
  std::vector<double> probs_;

  std::int64_t tick_ = 0;
  std::int64_t in_flight_ = 0;
  std::uint64_t next_packet_id_ = 0;
  CumulativeStats cumulative_;
  RunningAverageReward average_;
  DeliveryListener on_delivery_;
};

struct RunResult {
  std::vector<ParamTable> tables;
  RunningAverageReward average;
  CumulativeStats cumulative;
  std::int64_t ticks = 0;
};

using TickObserver = std::function<void(const TickStats&, const Simulator&)>;

inline RunResult run(const ExperimentConfig& cfg, const TickObserver& observer = {}) {
  Simulator sim(cfg);
  for (std::int64_t i = 0; i < cfg.steps; ++i) {
    TickStats s = sim.tick();
    if (observer) observer(s, sim);
  }
  return {sim.tables(), sim.running_average(), sim.cumulative(), sim.ticks_done()};
}

}  // namespace netpg
