#pragma once

#include "acrl/critic.hpp"
#include "acrl/env.hpp"
#include "acrl/features.hpp"

#include <memory>

namespace acrl {

/// Annulus free space with a target ball, unit-direction moves.
struct NavConfig {
  Vector start = (Vector(2) << 2.0, 2.0).finished();
  Vector target = (Vector(2) << -2.0, -2.0).finished();
  double inner_radius = 0.5;
  double outer_radius = 4.0;
  double step_length = 0.5;
  double target_tolerance = 0.5;
  double gamma = 0.9;

  double obstacle_reward = -11.0;
  double target_reward = -0.1;
  double default_reward = -1.0;

  /// Also requires the target ball to lie inside the free space.
  void validate() const;
};

/// s + step * a / |a|; a zero action moves along (1, 0).
State nav_step(const State& s, const Action& a, double step_length = 0.5);
double nav_reward(const State& s_next, const NavConfig& cfg = {});
/// |s| in [inner, outer], both ends inclusive.
bool in_free_space(const State& s, const NavConfig& cfg = {});

class NavEnvironment final : public Environment {
 public:
  explicit NavEnvironment(NavConfig cfg = {});

  Eigen::Index state_dim() const override { return 2; }
  Eigen::Index action_dim() const override { return 2; }
  double discount() const override { return cfg_.gamma; }
  double reward_bound() const override;
  State start_state() const override { return cfg_.start; }
  StepResult step(const State& s, const Action& a, Rng& rng) const override;

  const NavConfig& config() const { return cfg_; }

 private:
  NavConfig cfg_;
};

/// Critic features of the post-move state: phi(s, a) = rbf(nav_step(s, a)).
/// Dynamics are deterministic, so this equals the state features of s'.
class AfterstateFeatures final : public StateActionFeatures {
 public:
  AfterstateFeatures(std::shared_ptr<const StateFeatures> base, double step_length = 0.5)
      : base_(std::move(base)), step_length_(step_length) {}

  Eigen::Index dim() const override { return base_->dim(); }
  Vector operator()(const State& s, const Action& a) const override {
    return (*base_)(nav_step(s, a, step_length_));
  }

 private:
  std::shared_ptr<const StateFeatures> base_;
  double step_length_;
};

/// One tracker slot per feature center: a transition goes to the center
/// nearest its post-move state.
TrackerLayout nav_region_layout(const RbfFeatureMap& features, double step_length = 0.5);

}  // namespace acrl
