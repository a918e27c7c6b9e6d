#include "acrl/env.hpp"
#include "acrl/nav_env.hpp"
#include "acrl/oracle.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace acrl;
using namespace acrl::testing;

TEST(GeometricHorizon, NearZeroDiscountAlwaysZero) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_geometric_horizon(1e-12, rng), 0);
}

TEST(GeometricHorizon, MeanMatchesRatio) {
  Rng rng(2);
  const int n = 1000000;
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += sample_geometric_horizon(0.9, rng);
  EXPECT_NEAR(total / n, 9.0, 0.02 * 9.0);
}

TEST(GeometricHorizon, MassAtZero) {
  Rng rng(3);
  const int n = 1000000;
  int zeros = 0;
  for (int i = 0; i < n; ++i) zeros += sample_geometric_horizon(0.5, rng) == 0;
  EXPECT_NEAR(static_cast<double>(zeros) / n, 0.5, 0.01 * 0.5);
}

TEST(GeometricHorizon, ChiSquareGoodnessOfFit) {
  const double gamma = 0.9;
  const int n = 1000000;
  const int bins = 60;  // last bin collects the tail
  std::vector<double> counts(bins, 0.0);
  Rng rng(4);
  for (int i = 0; i < n; ++i) {
    const long t = sample_geometric_horizon(gamma, rng);
    counts[static_cast<std::size_t>(std::min<long>(t, bins - 1))] += 1.0;
  }
  double chi2 = 0.0;
  for (int t = 0; t < bins; ++t) {
    const double p = t < bins - 1 ? (1 - gamma) * std::pow(gamma, t) : std::pow(gamma, bins - 1);
    const double expected = n * p;
    chi2 += (counts[t] - expected) * (counts[t] - expected) / expected;
  }
  // Wilson-Hilferty 99% quantile of chi-square with bins - 1 degrees of freedom.
  const double df = bins - 1;
  const double z = 2.3263478740408408;
  const double crit = df * std::pow(1 - 2 / (9 * df) + z * std::sqrt(2 / (9 * df)), 3);
  EXPECT_LT(chi2, crit);
}

TEST(GeometricHorizon, RejectsDiscountOutsideUnitInterval) {
  Rng rng(5);
  EXPECT_THROW(sample_geometric_horizon(0.0, rng), ConfigError);
  EXPECT_THROW(sample_geometric_horizon(1.0, rng), ConfigError);
  EXPECT_THROW(sample_geometric_horizon(-0.3, rng), ConfigError);
}

TEST(Rollout, ZeroLengthStillSamplesAnAction) {
  ShiftEnvironment env;
  ConstantPolicy policy;
  Rng rng(6);
  const Vector a = (Vector(2) << 1.0, 2.0).finished();
  const Trajectory traj = rollout(env, policy, a, env.start_state(), 0, rng);
  EXPECT_EQ(traj.length(), 0u);
  ASSERT_EQ(traj.states.size(), 1u);
  ASSERT_EQ(traj.actions.size(), 1u);
  EXPECT_EQ(traj.last_action(), a);
}

TEST(Rollout, DeterministicComposition) {
  ShiftEnvironment env;
  ConstantPolicy policy;
  Rng rng(7);
  const Vector a = (Vector(2) << 0.5, -1.0).finished();
  const Trajectory traj = rollout(env, policy, a, env.start_state(), 3, rng);
  ASSERT_EQ(traj.length(), 3u);
  EXPECT_TRUE(traj.states[1].isApprox((Vector(2) << 0.5, -1.0).finished()));
  EXPECT_TRUE(traj.states[2].isApprox((Vector(2) << 1.0, -2.0).finished()));
  EXPECT_TRUE(traj.states[3].isApprox((Vector(2) << 1.5, -3.0).finished()));
  EXPECT_DOUBLE_EQ(traj.total_reward(), 0.5 + 1.0 + 1.5);
  EXPECT_DOUBLE_EQ(traj.discounted_return(0.5), 0.5 + 0.5 * 1.0 + 0.25 * 1.5);
}

TEST(Rollout, RewardBoundEnforced) {
  ShiftEnvironment env(0.75);
  ConstantPolicy policy;
  Rng rng(8);
  const Vector a = (Vector(2) << 0.5, 0.0).finished();
  EXPECT_THROW(rollout(env, policy, a, env.start_state(), 3, rng), NumericalError);
}

TEST(Rollout, NavigationRewardsAndReturnsBounded) {
  const NavEnvironment env;
  auto phi = std::make_shared<RbfFeatureMap>(RbfFeatureMap::grid(-5, 5, 10, 1.0));
  const GaussianLinearPolicy policy(phi, 2, 0.5);
  Rng rng(9);
  Vector params(policy.param_size());
  for (Eigen::Index i = 0; i < params.size(); ++i) params[i] = rng.normal();
  for (int r = 0; r < 50; ++r) {
    const Trajectory traj = rollout(env, policy, params, env.start_state(), 200, rng);
    for (double x : traj.rewards) EXPECT_LE(std::abs(x), 11.0);
    EXPECT_LE(std::abs(traj.discounted_return(0.9)), 11.0 / (1 - 0.9) + 1e-9);
  }
}

TEST(Rollout, SameSeedSameTrajectory) {
  const NavEnvironment env;
  auto phi = std::make_shared<RbfFeatureMap>(RbfFeatureMap::grid(-5, 5, 10, 1.0));
  const GaussianLinearPolicy policy(phi, 2, 0.5);
  const Vector params = Vector::Constant(policy.param_size(), 0.1);
  Rng a(42), b(42);
  const Trajectory ta = rollout(env, policy, params, env.start_state(), 100, a);
  const Trajectory tb = rollout(env, policy, params, env.start_state(), 100, b);
  for (std::size_t i = 0; i < ta.states.size(); ++i) {
    EXPECT_EQ(ta.states[i], tb.states[i]);
    EXPECT_EQ(ta.actions[i], tb.actions[i]);
  }
  EXPECT_EQ(ta.rewards, tb.rewards);
}

TEST(CriticTuple, ZeroBurnInStartsAtStartState) {
  const NavEnvironment env;
  auto phi = std::make_shared<RbfFeatureMap>(RbfFeatureMap::grid(-5, 5, 10, 1.0));
  const GaussianLinearPolicy policy(phi, 2, 0.5);
  Rng rng(10);
  const Vector params = Vector::Zero(policy.param_size());
  const TransitionTuple tup = sample_critic_tuple(env, policy, params, 0, rng);
  EXPECT_EQ(tup.s, env.start_state());
  EXPECT_TRUE(tup.s_next.isApprox(nav_step(tup.s, tup.a)));
  EXPECT_DOUBLE_EQ(tup.r, nav_reward(tup.s_next));
}

TEST(CriticTuple, BurnInApproachesStationaryDistribution) {
  const FiniteMdp m = two_state_chain(0.3, 0.1);
  const FiniteMdpEnvironment env(m);
  const SoftmaxTabularPolicy policy(2, 1);
  const Vector params = Vector::Zero(2);
  const Vector d = stationary_distribution(m, TabularPolicy::uniform(2, 1));
  // Hand value: d0 = p10 / (p01 + p10) = 0.25.
  EXPECT_NEAR(d[0], 0.25, 1e-12);
  Rng rng(11);
  const int n = 100000;
  int in_zero = 0;
  for (int i = 0; i < n; ++i) in_zero += sample_critic_tuple(env, policy, params, 1000, rng).s[0] == 0.0;
  EXPECT_NEAR(static_cast<double>(in_zero) / n, d[0], 0.02 * d[0]);
}

TEST(CriticTuple, NextActionIsOnPolicy) {
  const NavEnvironment env;
  auto phi = std::make_shared<RbfFeatureMap>(RbfFeatureMap::grid(-5, 5, 10, 1.0));
  const GaussianLinearPolicy policy(phi, 2, 0.5);
  Rng rng(12);
  Vector params(policy.param_size());
  for (Eigen::Index i = 0; i < params.size(); ++i) params[i] = 0.5 * rng.normal();
  const int n = 20000;
  Vector residual = Vector::Zero(2);
  for (int i = 0; i < n; ++i) {
    const TransitionTuple tup = sample_critic_tuple(env, policy, params, 5, rng);
    residual += tup.a_next - policy.mean_from_features(params, (*phi)(tup.s_next));
  }
  residual /= n;
  // Each coordinate of the mean residual has standard deviation sqrt(0.5 / n).
  EXPECT_LT(residual.cwiseAbs().maxCoeff(), 4.0 * std::sqrt(0.5 / n));
}

TEST(Discount, Validation) {
  EXPECT_NO_THROW(validate_discount(0.9));
  EXPECT_THROW(validate_discount(1.0), ConfigError);
  EXPECT_THROW(validate_discount(0.0), ConfigError);
}
