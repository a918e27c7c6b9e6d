#include "acrl/actor_critic.hpp"

#include <chrono>
#include <cmath>

namespace acrl {

EtaSchedule EtaSchedule::constant(double eta) {
  if (!(eta >= 0.0)) throw ConfigError("actor step size must be nonnegative");
  return {true, eta, 0.0};
}

EtaSchedule EtaSchedule::power(double exponent, double scale) {
  if (!(exponent > 0.0 && exponent < 1.0)) throw ConfigError("eta exponent must lie in (0, 1)");
  if (!(scale > 0.0)) throw ConfigError("eta scale must be positive");
  return {false, scale, exponent};
}

double EtaSchedule::operator()(long k) const {
  if (k < 1) throw ConfigError("actor iteration index starts at 1");
  return constant_ ? value_ : value_ * std::pow(static_cast<double>(k), -exponent_);
}

TcSchedule TcSchedule::parse(const std::string& name, long budget) {
  if (name == "linear") return linear();
  if (name == "linear_plus_one") return linear_plus_one();
  if (name == "constant") {
    if (budget < 1) throw ConfigError("constant critic budget must be >= 1");
    return constant(budget);
  }
  throw ConfigError("unknown critic effort schedule '" + name + "'");
}

long critic_effort(const TcSchedule& schedule, long k) {
  if (k < 1) throw ConfigError("actor iteration index starts at 1");
  switch (schedule.kind) {
    case TcSchedule::Kind::linear: return k;
    case TcSchedule::Kind::linear_plus_one: return k + 1;
    case TcSchedule::Kind::constant: return schedule.value;
  }
  return k;
}

void ActorConfig::validate() const {
  if (iterations < 1) throw ConfigError("need at least one actor iteration");
  if (!(freeze_norm > 0.0)) throw ConfigError("freeze norm must be positive");
  if (effort.kind == TcSchedule::Kind::constant && effort.value < 1)
    throw ConfigError("constant critic budget must be >= 1");
  if (eval_every < 1 || eval_trajectories < 1 || eval_length < 1)
    throw ConfigError("evaluation cadence, count and length must be >= 1");
  if (critic_rollouts < 0 || rollout_length < 1)
    throw ConfigError("critic rollouts must be >= 0 with length >= 1");
  if (!(critic.radius > 0.0)) throw ConfigError("critic radius must be positive");
  if ((critic.method != CriticMethod::td0) && !critic.schedule.has_beta())
    throw ConfigError("GTD-type critics need a schedule with a tracker step size");
}

std::vector<TraceRecord> RunTrace::evaluations() const {
  std::vector<TraceRecord> out;
  for (const TraceRecord& r : records)
    if (r.evaluated) out.push_back(r);
  return out;
}

double grad_norm_proxy(const PolicyFamily& policy, const Vector& params,
                       const std::vector<Trajectory>& trajectories) {
  double total = 0.0;
  long count = 0;
  for (const Trajectory& traj : trajectories)
    for (std::size_t t = 0; t < traj.length(); ++t) {
      total += policy.gradient_proxy(params, traj.states[t], traj.actions[t]);
      ++count;
    }
  return count ? total / count : 0.0;
}

Evaluator rollout_evaluator(const Environment& env, const PolicyFamily& policy, int trajectories,
                            long length) {
  return [&env, &policy, trajectories, length](const Vector& params, Rng& rng) {
    std::vector<Trajectory> runs;
    runs.reserve(static_cast<std::size_t>(trajectories));
    double reward = 0.0;
    for (int i = 0; i < trajectories; ++i) {
      runs.push_back(rollout(env, policy, params, env.start_state(), length, rng));
      reward += runs.back().total_reward();
    }
    return Evaluation{grad_norm_proxy(policy, params, runs), reward / trajectories};
  };
}

Vector gradient_estimate(const PolicyFamily& policy, const Vector& params, const Vector& xi,
                         const StateActionFeatures& features, const State& s_T,
                         const Action& a_T, double gamma) {
  const double q = q_value(xi, features(s_T, a_T));
  return (q / (1.0 - gamma)) * policy.score(params, s_T, a_T);
}

Vector actor_step(const Vector& params, const Vector& estimate, double eta, double freeze_norm) {
  if (!(eta >= 0.0)) throw ConfigError("actor step size must be nonnegative");
  if (params.norm() >= freeze_norm) return params;
  return params + eta * estimate;
}

std::optional<long> k_epsilon(const std::vector<double>& sq_grad_norms, double epsilon) {
  double best = INFINITY;
  for (std::size_t i = 0; i < sq_grad_norms.size(); ++i) {
    best = std::min(best, sq_grad_norms[i]);
    if (best < epsilon) return static_cast<long>(i + 1);
  }
  return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;

bool finite(const Vector& v) { return v.allFinite(); }

void begin_iteration(Critic& critic, const ActorConfig& config) {
  if (config.reset_critic) {
    critic.restart();
    return;
  }
  critic.reset_trackers();
  if (config.clock == CriticClock::per_iteration) critic.reset_clock();
}

class TraceBuilder {
 public:
  TraceBuilder(const ActorConfig& config, Evaluator evaluator, Rng& rng)
      : config_(config), evaluator_(std::move(evaluator)), rng_(rng), start_(Clock::now()) {}

  /// Returns false when the run must abort.
  bool record(RunTrace& trace, long k, const Vector& params, const Critic& critic) {
    TraceRecord rec;
    rec.k = k;
    rec.theta_norm = params.norm();
    rec.xi_norm = critic.xi().norm();
    rec.critic_steps = critic.steps_total();
    if (evaluator_ && k % config_.eval_every == 0) {
      Rng eval_rng = rng_.split();
      const Evaluation e = evaluator_(params, eval_rng);
      rec.grad_proxy = e.grad_proxy;
      rec.eval_reward = e.reward;
      rec.evaluated = true;
    }
    rec.wall_seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    trace.records.push_back(rec);
    if (!finite(params) || !finite(critic.xi())) {
      trace.aborted = true;
      trace.abort_reason = "non-finite parameters at actor iteration " + std::to_string(k);
      return false;
    }
    return true;
  }

 private:
  const ActorConfig& config_;
  Evaluator evaluator_;
  Rng& rng_;
  Clock::time_point start_;
};

}  // namespace

RunTrace run_generic(const Environment& env, const PolicyFamily& policy,
                     const StateActionFeatures& features, const TupleSampler& sampler,
                     const ActorConfig& config, Rng& rng, Evaluator evaluator,
                     const TrackerLayout& layout) {
  config.validate();
  const double gamma = env.discount();
  Critic critic(config.critic, features.dim(), gamma, layout);
  Vector params = Vector::Zero(policy.param_size());
  RunTrace trace;
  TraceBuilder builder(config, std::move(evaluator), rng);

  for (long k = 1; k <= config.iterations; ++k) {
    begin_iteration(critic, config);
    const long budget = critic_effort(config.effort, k);
    for (long t = 0; t < budget; ++t) critic.update(sampler.sample(policy, params, rng), features);

    const long horizon = sample_geometric_horizon(gamma, rng);
    const Trajectory traj = rollout(env, policy, params, env.start_state(), horizon, rng);
    const Vector estimate = gradient_estimate(policy, params, critic.xi(), features,
                                              traj.last_state(), traj.last_action(), gamma);
    params = actor_step(params, estimate, config.eta(k), config.freeze_norm);
    if (!builder.record(trace, k, params, critic)) break;
  }
  trace.params = params;
  trace.xi = critic.xi();
  return trace;
}

RunTrace run_practical(const Environment& env, const PolicyFamily& policy,
                       const StateActionFeatures& features, const ActorConfig& config, Rng& rng,
                       Evaluator evaluator, const TrackerLayout& layout) {
  config.validate();
  const double gamma = env.discount();
  Critic critic(config.critic, features.dim(), gamma, layout);
  Vector params = Vector::Zero(policy.param_size());
  RunTrace trace;
  TraceBuilder builder(config, std::move(evaluator), rng);
  const State start = env.start_state();

  for (long k = 1; k <= config.iterations; ++k) {
    begin_iteration(critic, config);
    for (int i = 0; i < config.critic_rollouts; ++i) {
      const Trajectory traj = rollout(env, policy, params, start, config.rollout_length, rng);
      Vector phi = features(traj.states[0], traj.actions[0]);
      for (std::size_t t = 0; t < traj.length(); ++t) {
        Vector phi_next = features(traj.states[t + 1], traj.actions[t + 1]);
        critic.update(FeaturePair{phi, phi_next}, traj.rewards[t],
                      layout(traj.states[t], traj.actions[t]));
        phi = std::move(phi_next);
      }
    }

    State s = start;
    const double eta = config.eta(k);
    for (long t = 0; t < config.rollout_length; ++t) {
      const Action a = policy.sample(params, s, rng);
      const Vector estimate =
          gradient_estimate(policy, params, critic.xi(), features, s, a, gamma);
      params = actor_step(params, estimate, eta, config.freeze_norm);
      s = observe(env, s, a, rng).next;
    }
    if (!builder.record(trace, k, params, critic)) break;
  }
  trace.params = params;
  trace.xi = critic.xi();
  return trace;
}

}  // namespace acrl
