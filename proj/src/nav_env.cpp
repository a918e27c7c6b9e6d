#include "acrl/nav_env.hpp"

#include <algorithm>
#include <cmath>

namespace acrl {

void NavConfig::validate() const {
  validate_discount(gamma);
  if (start.size() != 2 || target.size() != 2) throw ConfigError("nav: states are 2-D");
  if (!(inner_radius > 0.0 && inner_radius < outer_radius))
    throw ConfigError("nav: need 0 < inner radius < outer radius");
  if (!(step_length > 0.0)) throw ConfigError("nav: step length must be positive");
  if (!(target_tolerance > 0.0)) throw ConfigError("nav: target tolerance must be positive");
  const double t = target.norm();
  if (t - target_tolerance < inner_radius || t + target_tolerance > outer_radius)
    throw ConfigError("nav: target ball must lie inside the free space");
}

State nav_step(const State& s, const Action& a, double step_length) {
  const double n = a.norm();
  if (n == 0.0) return s + step_length * Vector::Unit(s.size(), 0);
  return s + (step_length / n) * a;
}

bool in_free_space(const State& s, const NavConfig& cfg) {
  const double r = s.norm();
  return r >= cfg.inner_radius && r <= cfg.outer_radius;
}

double nav_reward(const State& s_next, const NavConfig& cfg) {
  if (!in_free_space(s_next, cfg)) return cfg.obstacle_reward;
  if ((s_next - cfg.target).norm() < cfg.target_tolerance) return cfg.target_reward;
  return cfg.default_reward;
}

NavEnvironment::NavEnvironment(NavConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

double NavEnvironment::reward_bound() const {
  return std::max({std::abs(cfg_.obstacle_reward), std::abs(cfg_.target_reward),
                   std::abs(cfg_.default_reward)});
}

StepResult NavEnvironment::step(const State& s, const Action& a, Rng&) const {
  State next = nav_step(s, a, cfg_.step_length);
  const double r = nav_reward(next, cfg_);
  return {std::move(next), r};
}

TrackerLayout nav_region_layout(const RbfFeatureMap& features, double step_length) {
  const Matrix centers = features.centers();
  return {static_cast<int>(centers.cols()), [centers, step_length](const State& s, const Action& a) {
            Eigen::Index best = 0;
            (centers.colwise() - nav_step(s, a, step_length)).colwise().squaredNorm().minCoeff(&best);
            return static_cast<int>(best);
          }};
}

}  // namespace acrl
