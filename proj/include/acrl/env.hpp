#pragma once

#include "acrl/policy.hpp"
#include "acrl/rng.hpp"
#include "acrl/types.hpp"

#include <vector>

namespace acrl {

struct StepResult {
  State next;
  double reward = 0.0;
};

/// Discounted MDP with a declared reward bound. Implementations are immutable
/// after construction and may be shared between threads.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual Eigen::Index state_dim() const = 0;
  virtual Eigen::Index action_dim() const = 0;
  virtual double discount() const = 0;
  /// U_R: every emitted reward satisfies |r| <= U_R.
  virtual double reward_bound() const = 0;
  virtual State start_state() const = 0;
  virtual StepResult step(const State& s, const Action& a, Rng& rng) const = 0;
};

/// Throws ConfigError unless gamma lies strictly inside (0, 1).
void validate_discount(double gamma);

/// env.step() followed by the reward-bound check; throws NumericalError on
/// a reward outside [-U_R, U_R].
StepResult observe(const Environment& env, const State& s, const Action& a, Rng& rng);

struct TransitionTuple {
  State s;
  Action a;
  double r = 0.0;
  State s_next;
  Action a_next;
};

/// states and actions hold length + 1 entries (an action is sampled at the
/// final state as well); rewards holds length entries.
struct Trajectory {
  std::vector<State> states;
  std::vector<Action> actions;
  std::vector<double> rewards;

  std::size_t length() const { return rewards.size(); }
  const State& start() const { return states.front(); }
  const State& last_state() const { return states.back(); }
  const Action& last_action() const { return actions.back(); }
  double total_reward() const;
  double discounted_return(double gamma) const;
};

/// T ~ Geom(1 - gamma) on {0, 1, 2, ...}: P(T = t) = (1 - gamma) gamma^t.
long sample_geometric_horizon(double gamma, Rng& rng);

Trajectory rollout(const Environment& env, const PolicyFamily& policy, const Vector& params,
                   const State& s0, long length, Rng& rng);

/// On-policy tuple whose first state ends a burn_in-step rollout from the
/// environment start state.
TransitionTuple sample_critic_tuple(const Environment& env, const PolicyFamily& policy,
                                    const Vector& params, long burn_in, Rng& rng);

/// Source of critic tuples under the current policy parameters.
class TupleSampler {
 public:
  virtual ~TupleSampler() = default;
  virtual TransitionTuple sample(const PolicyFamily& policy, const Vector& params,
                                 Rng& rng) const = 0;
};

class BurnInSampler final : public TupleSampler {
 public:
  explicit BurnInSampler(const Environment& env, long burn_in = 200);
  TransitionTuple sample(const PolicyFamily& policy, const Vector& params,
                         Rng& rng) const override;

 private:
  const Environment& env_;
  long burn_in_;
};

}  // namespace acrl
