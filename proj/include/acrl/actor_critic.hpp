#pragma once

#include "acrl/critic.hpp"
#include "acrl/env.hpp"
#include "acrl/features.hpp"
#include "acrl/policy.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace acrl {

/// Actor step size: constant, or eta_k = scale * k^-exponent.
class EtaSchedule {
 public:
  static EtaSchedule constant(double eta);
  static EtaSchedule power(double exponent = 0.5, double scale = 1.0);

  double operator()(long k) const;
  bool is_constant() const { return constant_; }
  double value() const { return value_; }
  double exponent() const { return exponent_; }

 private:
  EtaSchedule(bool constant, double value, double exponent)
      : constant_(constant), value_(value), exponent_(exponent) {}

  bool constant_;
  double value_;
  double exponent_;
};

/// Critic updates before the k-th actor update.
struct TcSchedule {
  enum class Kind { linear, linear_plus_one, constant };
  Kind kind = Kind::linear_plus_one;
  long value = 1;  // budget of the constant schedule

  static TcSchedule linear() { return {Kind::linear, 0}; }
  static TcSchedule linear_plus_one() { return {Kind::linear_plus_one, 0}; }
  static TcSchedule constant(long n) { return {Kind::constant, n}; }
  /// "linear", "linear_plus_one", or "constant"; the budget comes separately.
  static TcSchedule parse(const std::string& name, long budget = 1);
};

long critic_effort(const TcSchedule& schedule, long k);

/// How the critic's step-size clock behaves across actor iterations.
enum class CriticClock { global, per_iteration };

struct ActorConfig {
  EtaSchedule eta = EtaSchedule::power(0.5);
  TcSchedule effort = TcSchedule::linear_plus_one();
  CriticConfig critic;
  CriticClock clock = CriticClock::per_iteration;
  long iterations = 100;        // K
  double freeze_norm = 100.0;   // actor updates stop once |theta| reaches this
  bool reset_critic = false;    // xi back to zero every actor iteration

  int eval_every = 10;
  int eval_trajectories = 10;
  long eval_length = 200;

  // Batched variant.
  int critic_rollouts = 10;
  long rollout_length = 200;

  void validate() const;
};

struct TraceRecord {
  long k = 0;
  double grad_proxy = 0.0;
  double eval_reward = 0.0;
  double theta_norm = 0.0;
  double xi_norm = 0.0;
  long critic_steps = 0;
  double wall_seconds = 0.0;
  bool evaluated = false;
};

struct RunTrace {
  std::vector<TraceRecord> records;
  bool aborted = false;
  std::string abort_reason;
  Vector params;
  Vector xi;

  std::vector<TraceRecord> evaluations() const;
};

struct Evaluation {
  double grad_proxy = 0.0;
  double reward = 0.0;
};

/// Evaluates the current actor parameters.
using Evaluator = std::function<Evaluation(const Vector& params, Rng& rng)>;

/// Mean gradient proxy and mean undiscounted return over `trajectories`
/// rollouts of `length` steps from the start state.
Evaluator rollout_evaluator(const Environment& env, const PolicyFamily& policy, int trajectories,
                            long length);

/// Average of the per-transition gradient proxy over all transitions.
double grad_norm_proxy(const PolicyFamily& policy, const Vector& params,
                       const std::vector<Trajectory>& trajectories);

/// (1 / (1 - gamma)) xi^T phi(s_T, a_T) score(s_T, a_T).
Vector gradient_estimate(const PolicyFamily& policy, const Vector& params, const Vector& xi,
                         const StateActionFeatures& features, const State& s_T,
                         const Action& a_T, double gamma);

/// theta + eta * estimate, or theta unchanged once |theta| >= freeze_norm.
Vector actor_step(const Vector& params, const Vector& estimate, double eta,
                  double freeze_norm = 100.0);

/// Generic loop: T_C(k) sampled critic updates, one geometric-horizon
/// rollout, one actor step per iteration.
RunTrace run_generic(const Environment& env, const PolicyFamily& policy,
                     const StateActionFeatures& features, const TupleSampler& sampler,
                     const ActorConfig& config, Rng& rng, Evaluator evaluator = nullptr,
                     const TrackerLayout& layout = TrackerLayout::pooled());

/// Batched loop: per iteration, critic_rollouts full rollouts drive the
/// critic on every transition, then one rollout updates the actor online at
/// every step.
RunTrace run_practical(const Environment& env, const PolicyFamily& policy,
                       const StateActionFeatures& features, const ActorConfig& config, Rng& rng,
                       Evaluator evaluator = nullptr,
                       const TrackerLayout& layout = TrackerLayout::pooled());

/// Smallest k with min_{m <= k} sq_grad_norms[m - 1] < epsilon.
std::optional<long> k_epsilon(const std::vector<double>& sq_grad_norms, double epsilon);

}  // namespace acrl
