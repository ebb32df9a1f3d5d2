#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "netpg/olpomdp.hpp"

namespace netpg {
namespace {

// Router 0 with rows for destinations 1 and 2, two slots each.
ParamTable two_rows() { return ParamTable(NodeId(0), {NodeId(1), NodeId(2)}, 2, 3); }

void set_row(ParamTable& p, NodeId y, std::vector<double> v) { std::copy(v.begin(), v.end(), p.row(y).begin()); }

TEST(BeginTickAccumulate, MemorylessTraceKeepsOnlyThisTick) {
  EligibilityTrace tr(two_rows());
  set_row(tr.table(), NodeId(1), {7, -3});
  set_row(tr.table(), NodeId(2), {0.25, 4});
  LearnerConfig cfg{.beta = 0.0};
  std::vector<RowGradient> g{{NodeId(2), {0.3, -0.3}}};
  begin_tick_accumulate(tr, cfg, g);
  EXPECT_EQ(tr.row(NodeId(1))[0], 0.0);
  EXPECT_EQ(tr.row(NodeId(1))[1], 0.0);
  EXPECT_EQ(tr.row(NodeId(2))[0], 0.3);
  EXPECT_EQ(tr.row(NodeId(2))[1], -0.3);
}

TEST(BeginTickAccumulate, HalfDiscount) {
  EligibilityTrace tr(two_rows());
  set_row(tr.table(), NodeId(1), {1, -1});
  std::vector<RowGradient> g{{NodeId(1), {0.5, -0.5}}};
  begin_tick_accumulate(tr, LearnerConfig{.beta = 0.5}, g);
  EXPECT_EQ(tr.row(NodeId(1))[0], 1.0);
  EXPECT_EQ(tr.row(NodeId(1))[1], -1.0);
}

TEST(BeginTickAccumulate, NoDecisionsDecaysGeometrically) {
  EligibilityTrace tr(two_rows());
  set_row(tr.table(), NodeId(1), {2, -2});
  set_row(tr.table(), NodeId(2), {1, 3});
  const LearnerConfig cfg{.beta = 0.9};
  const std::vector<double> before(tr.values().begin(), tr.values().end());
  for (int k = 1; k <= 30; ++k) {
    begin_tick_accumulate(tr, cfg, {});
    for (std::size_t i = 0; i < before.size(); ++i) EXPECT_NEAR(tr.values()[i], std::pow(0.9, k) * before[i], 1e-14);
  }
}

TEST(BeginTickAccumulate, ShapeMismatchThrows) {
  EligibilityTrace tr(two_rows());
  std::vector<RowGradient> g{{NodeId(1), {1, 0, -1}}};
  EXPECT_THROW(begin_tick_accumulate(tr, LearnerConfig{}, g), Error);
  const std::vector<RowGradient> missing{{NodeId(0), {1, -1}}};
  EXPECT_THROW(begin_tick_accumulate(tr, LearnerConfig{}, missing), Error);
  ParamTable wrong(NodeId(0), {NodeId(1)}, 2, 3);
  EXPECT_THROW(fold_decisions(tr, LearnerConfig{}, wrong), Error);
}

TEST(BeginTickAccumulate, LinearInGradients) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 100; ++trial) {
    EligibilityTrace base(two_rows());
    for (double& v : base.table().values()) v = u(gen);
    std::vector<RowGradient> g1{{NodeId(1), {u(gen), u(gen)}}}, g2{{NodeId(2), {u(gen), u(gen)}}};
    std::vector<RowGradient> both = g1;
    both.push_back(g2[0]);
    const LearnerConfig cfg{.beta = 0.7};

    EligibilityTrace a = base, b = base, zero(two_rows()), c = zero;
    begin_tick_accumulate(a, cfg, both);
    begin_tick_accumulate(b, cfg, g1);
    begin_tick_accumulate(c, cfg, g2);
    for (std::size_t i = 0; i < a.values().size(); ++i) EXPECT_NEAR(a.values()[i], b.values()[i] + c.values()[i], 1e-14);
  }
}

TEST(FoldDecisions, AgreesWithSparseForm) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(-1, 1);
  EligibilityTrace sparse(two_rows());
  EligibilityTrace dense = sparse;
  const LearnerConfig cfg{.beta = 0.95};
  for (int tick = 0; tick < 200; ++tick) {
    std::vector<RowGradient> grads;
    ParamTable pending = two_rows();
    for (int k = 0; k < 3; ++k) {
      NodeId y(1 + gen() % 2);
      const double a = u(gen);
      grads.push_back({y, {a, -a}});
      pending.row(y)[0] += a;
      pending.row(y)[1] -= a;
    }
    begin_tick_accumulate(sparse, cfg, grads);
    fold_decisions(dense, cfg, pending);
    for (std::size_t i = 0; i < dense.values().size(); ++i) EXPECT_NEAR(dense.values()[i], sparse.values()[i], 1e-12);
  }
}

TEST(ApplyReward, Examples) {
  ParamTable theta = two_rows();
  EligibilityTrace tr(theta);
  set_row(tr.table(), NodeId(1), {0.5, -0.5});
  const LearnerConfig cfg{.beta = 0.99, .gamma = 1e-5};

  ParamTable same = theta;
  apply_reward(same, tr, cfg, 0.0);
  EXPECT_EQ(same, theta);

  apply_reward(theta, tr, cfg, -3.0);
  EXPECT_NEAR(theta.row(NodeId(1))[0], -1.5e-5, 1e-20);
  EXPECT_NEAR(theta.row(NodeId(1))[1], 1.5e-5, 1e-20);
  EXPECT_EQ(theta.row(NodeId(2))[0], 0.0);

  ParamTable untouched = two_rows();
  set_row(untouched, NodeId(2), {1, 2});
  const ParamTable copy = untouched;
  apply_reward(untouched, EligibilityTrace(untouched), cfg, -1234.5);
  EXPECT_EQ(untouched, copy);
}

TEST(ApplyReward, RejectsNonFiniteRewardAndShapeMismatch) {
  ParamTable theta = two_rows();
  EligibilityTrace tr(theta);
  EXPECT_THROW(apply_reward(theta, tr, LearnerConfig{}, std::nan("")), Error);
  EXPECT_THROW(apply_reward(theta, tr, LearnerConfig{}, INFINITY), Error);
  ParamTable other(NodeId(0), {NodeId(1)}, 2, 3);
  EXPECT_THROW(apply_reward(other, tr, LearnerConfig{}, 1.0), Error);
}

TEST(LearnerConfig, Validation) {
  EXPECT_TRUE(learner_config_errors({}).empty());
  EXPECT_FALSE(learner_config_errors({.beta = 1.0}).empty());
  EXPECT_FALSE(learner_config_errors({.beta = -0.1}).empty());
  EXPECT_FALSE(learner_config_errors({.gamma = 0.0}).empty());
  EXPECT_FALSE(learner_config_errors({.gamma = INFINITY}).empty());
}

TEST(RunningAverage, Examples) {
  RunningAverageReward m;
  EXPECT_EQ(m.mean(), 0.0);
  for (double r : {-12.0, -22.0, -7.0}) m = observe_reward(m, r);
  EXPECT_DOUBLE_EQ(m.mean(), -41.0 / 3.0);
  EXPECT_EQ(observe_reward({}, 2.5).mean(), 2.5);
  RunningAverageReward zeros;
  for (int i = 0; i < 10; ++i) zeros.observe(0.0);
  EXPECT_EQ(zeros.mean(), 0.0);
}

// Two-armed bandit: arm 0 pays 1, arm 1 pays 0. With beta = 0 every update is
// an unbiased REINFORCE step, so the policy must move onto arm 0.
TEST(Learner, TwoArmBanditConvergesToBetterArm) {
  ParamTable theta(NodeId(0), {NodeId(1)}, 2, 2);
  EligibilityTrace tr(theta);
  const LearnerConfig cfg{.beta = 0.0, .gamma = 0.01};
  RandomStream rng(17);
  for (int t = 0; t < 100'000; ++t) {
    RoutingDecision d = sample_link(theta, NodeId(1), rng, t);
    std::vector<RowGradient> g{{NodeId(1), log_policy_gradient(theta, NodeId(1), d.slot)}};
    begin_tick_accumulate(tr, cfg, g);
    apply_reward(theta, tr, cfg, d.slot == 0 ? 1.0 : 0.0);
  }
  EXPECT_GT(action_probabilities(theta, NodeId(1)).probs[0], 0.95);
}

}  // namespace
}  // namespace netpg
