#pragma once

// Online policy-gradient learner state for one router: a discounted
// eligibility trace of log-policy gradients and the parameter step
// theta += gamma * r * z.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "netpg/common.hpp"
#include "netpg/gibbs_policy.hpp"

namespace netpg {

enum class StepSchedule { Constant };

// When the tick's reward is applied relative to folding the tick's decisions
// into the trace.
enum class TraceTiming {
  PostDecision,  // fold decisions, then theta += gamma * r_t * z_{t+1}
  PreDecision,   // theta += gamma * r_t * z_t, then fold decisions
};

struct LearnerConfig {
  double beta = 0.99;
  double gamma = 1e-5;
  StepSchedule schedule = StepSchedule::Constant;
  TraceTiming timing = TraceTiming::PostDecision;

  friend bool operator==(const LearnerConfig&, const LearnerConfig&) = default;
};

inline std::vector<std::string> learner_config_errors(const LearnerConfig& cfg) {
  std::vector<std::string> errors;
  if (!(cfg.beta >= 0.0 && cfg.beta < 1.0)) errors.push_back("beta must lie in [0, 1)");
  if (!(cfg.gamma > 0.0) || !std::isfinite(cfg.gamma)) errors.push_back("gamma must be a positive finite number");
  return errors;
}

// Same shape and indexing as the owning router's ParamTable.
class EligibilityTrace {
 public:
  EligibilityTrace() = default;
  explicit EligibilityTrace(const ParamTable& shape) : z_(shape) {
    for (double& v : z_.values()) v = 0.0;
  }

  const ParamTable& table() const { return z_; }
  ParamTable& table() { return z_; }

  std::span<const double> row(NodeId y) const { return z_.row(y); }
  std::span<const double> values() const { return z_.values(); }

  friend bool operator==(const EligibilityTrace&, const EligibilityTrace&) = default;

 private:
  ParamTable z_;
};

struct RowGradient {
  NodeId destination;
  std::vector<double> gradient;
};

inline void decay_trace(EligibilityTrace& tr, const LearnerConfig& cfg) {
  for (double& v : tr.table().values()) v *= cfg.beta;
}

inline void add_to_trace(EligibilityTrace& tr, NodeId destination, std::span<const double> gradient) {
  auto row = tr.table().row(destination);
  if (gradient.size() != row.size())
    throw Error("trace update: gradient has " + std::to_string(gradient.size()) + " components, row has " +
                std::to_string(row.size()));
  for (std::size_t u = 0; u < row.size(); ++u) row[u] += gradient[u];
}

// z <- beta * z + sum of this tick's decision gradients.
inline void begin_tick_accumulate(EligibilityTrace& tr, const LearnerConfig& cfg, std::span<const RowGradient> grads) {
  for (const RowGradient& g : grads)
    if (g.gradient.size() != tr.table().row(g.destination).size())
      throw Error("trace update: gradient shape does not match its row");
  decay_trace(tr, cfg);
  for (const RowGradient& g : grads) add_to_trace(tr, g.destination, g.gradient);
}

// Dense form of begin_tick_accumulate: `pending` holds the summed gradients of
// this tick's decisions, shaped like the trace.
inline void fold_decisions(EligibilityTrace& tr, const LearnerConfig& cfg, const ParamTable& pending) {
  if (!pending.same_shape(tr.table())) throw Error("trace update: pending gradients have the wrong shape");
  auto z = tr.table().values();
  auto g = pending.values();
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = cfg.beta * z[i] + g[i];
}

// theta <- theta + gamma * r * z.
inline void apply_reward(ParamTable& p, const EligibilityTrace& tr, const LearnerConfig& cfg, double reward) {
  if (!std::isfinite(reward)) throw Error("apply_reward: non-finite reward");
  if (!p.same_shape(tr.table())) throw Error("apply_reward: trace shape does not match parameter table");
  if (reward == 0.0) return;
  const double step = cfg.gamma * reward;
  auto theta = p.values();
  auto z = tr.values();
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += step * z[i];
}

// Exact running arithmetic mean of every reward observed.
struct RunningAverageReward {
  std::int64_t count = 0;
  double sum = 0.0;

  void observe(double reward) {
    ++count;
    sum += reward;
  }

  double mean() const { return count == 0 ? 0.0 : sum / static_cast<double>(count); }
};

inline RunningAverageReward observe_reward(RunningAverageReward m, double reward) {
  m.observe(reward);
  return m;
}

}  // namespace netpg
