#include "acrl/env.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace acrl {

void validate_discount(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    std::ostringstream msg;
    msg << "discount factor must lie in (0, 1), got " << gamma;
    throw ConfigError(msg.str());
  }
}

StepResult observe(const Environment& env, const State& s, const Action& a, Rng& rng) {
  StepResult out = env.step(s, a, rng);
  if (!(std::abs(out.reward) <= env.reward_bound())) {
    std::ostringstream msg;
    msg << "reward " << out.reward << " exceeds declared bound " << env.reward_bound();
    throw NumericalError(msg.str());
  }
  return out;
}

double Trajectory::total_reward() const {
  double total = 0.0;
  for (double r : rewards) total += r;
  return total;
}

double Trajectory::discounted_return(double gamma) const {
  double total = 0.0;
  double weight = 1.0;
  for (double r : rewards) {
    total += weight * r;
    weight *= gamma;
  }
  return total;
}

long sample_geometric_horizon(double gamma, Rng& rng) {
  validate_discount(gamma);
  std::geometric_distribution<long> horizon(1.0 - gamma);
  return horizon(rng);
}

Trajectory rollout(const Environment& env, const PolicyFamily& policy, const Vector& params,
                   const State& s0, long length, Rng& rng) {
  if (length < 0) throw ConfigError("rollout length must be nonnegative");
  Trajectory traj;
  traj.states.reserve(static_cast<std::size_t>(length) + 1);
  traj.actions.reserve(static_cast<std::size_t>(length) + 1);
  traj.rewards.reserve(static_cast<std::size_t>(length));
  traj.states.push_back(s0);
  traj.actions.push_back(policy.sample(params, s0, rng));
  for (long t = 0; t < length; ++t) {
    StepResult next = observe(env, traj.states.back(), traj.actions.back(), rng);
    traj.rewards.push_back(next.reward);
    traj.actions.push_back(policy.sample(params, next.next, rng));
    traj.states.push_back(std::move(next.next));
  }
  return traj;
}

TransitionTuple sample_critic_tuple(const Environment& env, const PolicyFamily& policy,
                                    const Vector& params, long burn_in, Rng& rng) {
  if (burn_in < 0) throw ConfigError("burn-in length must be nonnegative");
  State s = env.start_state();
  for (long t = 0; t < burn_in; ++t) {
    const Action a = policy.sample(params, s, rng);
    s = observe(env, s, a, rng).next;
  }
  TransitionTuple tup;
  tup.a = policy.sample(params, s, rng);
  StepResult next = observe(env, s, tup.a, rng);
  tup.s = std::move(s);
  tup.r = next.reward;
  tup.a_next = policy.sample(params, next.next, rng);
  tup.s_next = std::move(next.next);
  return tup;
}

BurnInSampler::BurnInSampler(const Environment& env, long burn_in)
    : env_(env), burn_in_(burn_in) {
  if (burn_in < 0) throw ConfigError("burn-in length must be nonnegative");
}

TransitionTuple BurnInSampler::sample(const PolicyFamily& policy, const Vector& params,
                                      Rng& rng) const {
  return sample_critic_tuple(env_, policy, params, burn_in_, rng);
}

}  // namespace acrl
