#pragma once

#include "acrl/critic.hpp"
#include "acrl/env.hpp"
#include "acrl/features.hpp"
#include "acrl/policy.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace acrl {

/// Explicit tabular MDP. Transition probabilities are stored s-major:
/// index ((s * A) + a) * S + s'.
struct FiniteMdp {
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> transitions;
  Matrix rewards;  // S x A
  int start_state = 0;
  double gamma = 0.9;
  double reward_bound = 1.0;

  double p(int s, int a, int s_next) const {
    return transitions[(static_cast<std::size_t>(s) * num_actions + a) * num_states + s_next];
  }
  int num_pairs() const { return num_states * num_actions; }
  int pair_index(int s, int a) const { return s * num_actions + a; }

  /// Stochastic rows within 1e-12, |R| <= U_R, valid start state and gamma.
  void validate() const;

  /// One tracker slot per (s, a) pair.
  TrackerLayout pair_layout() const;
};

/// Probability table pi[s][a].
struct TabularPolicy {
  Matrix probs;  // S x A

  static TabularPolicy uniform(int num_states, int num_actions);
  static TabularPolicy softmax(const Vector& logits, int num_states, int num_actions);
  /// Table of any policy family over index-encoded states and actions.
  static TabularPolicy from_family(const PolicyFamily& family, const Vector& params,
                                   int num_states, int num_actions);
  void validate() const;
  double operator()(int s, int a) const { return probs(s, a); }
};

class FiniteMdpEnvironment final : public Environment {
 public:
  explicit FiniteMdpEnvironment(FiniteMdp mdp);

  Eigen::Index state_dim() const override { return 1; }
  Eigen::Index action_dim() const override { return 1; }
  double discount() const override { return mdp_.gamma; }
  double reward_bound() const override { return mdp_.reward_bound; }
  State start_state() const override { return scalar_vector(mdp_.start_state); }
  StepResult step(const State& s, const Action& a, Rng& rng) const override;

  const FiniteMdp& mdp() const { return mdp_; }

 private:
  FiniteMdp mdp_;
};

/// I.i.d. tuples with (s, a) drawn exactly from the stationary state-action
/// distribution of the policy chain. Caches the distribution for the last
/// parameter vector seen, so one instance belongs to one run.
class StationarySampler final : public TupleSampler {
 public:
  explicit StationarySampler(const FiniteMdp& mdp);
  TransitionTuple sample(const PolicyFamily& policy, const Vector& params,
                         Rng& rng) const override;

 private:
  const FiniteMdp& mdp_;
  mutable Vector cached_params_;
  mutable Vector cumulative_;  // over pairs
  mutable Matrix table_;
};

/// Reference instance for oracle checks and critic rate experiments.
/// Rewards are constructed so that Q of the reference policy is exactly
/// representable: Q = Phi xi_true.
struct ReferenceInstance {
  FiniteMdp mdp;
  TabularFeatureMap features;
  Vector reference_logits;  // softmax policy parameters
  Vector xi_true;
};

/// 4 states, 2 actions, gamma 0.9, 3 features, |R| <= 1.
ReferenceInstance make_reference_instance(std::uint64_t seed = 7, int num_states = 4,
                                          int num_actions = 2, Eigen::Index feature_dim = 3,
                                          double gamma = 0.9);

/// Plain-text format (whitespace separated, '#' starts a comment):
///   S A gamma start
///   S*A rows of S transition probabilities, ordered s-major then a
///   S rows of A rewards
///   optionally: "features p" then S*A rows of p feature values
struct FiniteMdpFile {
  FiniteMdp mdp;
  std::optional<Matrix> features;
};

FiniteMdpFile read_finite_mdp(std::istream& in);
FiniteMdpFile load_finite_mdp(const std::string& path);
void write_finite_mdp(std::ostream& out, const FiniteMdp& mdp,
                      const Matrix* features = nullptr);

}  // namespace acrl
