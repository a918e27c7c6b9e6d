#pragma once

#include "acrl/features.hpp"
#include "acrl/rng.hpp"
#include "acrl/types.hpp"

#include <memory>

namespace acrl {

/// A differentiable stochastic policy family pi_theta(a | s). Parameters are
/// passed as a flat vector so the actor update is family-agnostic.
class PolicyFamily {
 public:
  virtual ~PolicyFamily() = default;

  virtual Eigen::Index param_size() const = 0;
  virtual Action sample(const Vector& params, const State& s, Rng& rng) const = 0;
  /// Gradient of log pi_theta(a | s) with respect to the flat parameters.
  virtual Vector score(const Vector& params, const State& s, const Action& a) const = 0;
  virtual double log_density(const Vector& params, const State& s, const Action& a) const = 0;

  /// Per-transition quantity averaged into the gradient-norm proxy of a trace.
  virtual double gradient_proxy(const Vector& params, const State& s, const Action& a) const {
    return score(params, s, a).norm();
  }
};

// ---------------------------------------------------------------------------
// Gaussian policy with mean theta^T phi(s) and covariance c * I.
// ---------------------------------------------------------------------------

struct PolicyParams {
  Matrix theta;            // p features x action_dim
  double variance = 0.5;   // c in Sigma = c * I

  static PolicyParams zeros(Eigen::Index features, Eigen::Index action_dim, double variance);
  void validate() const;
};

Action policy_mean(const PolicyParams& params, const Vector& phi);
Action sample_action(const PolicyParams& params, const Vector& phi, Rng& rng);
/// phi (a - theta^T phi)^T / c, the exact gradient of log_density in theta.
Matrix score(const PolicyParams& params, const Vector& phi, const Action& a);
double log_density(const PolicyParams& params, const Vector& phi, const Action& a);

/// Upper bound on |score| for unit-norm features and |a| <= a_max.
double score_norm_bound(double a_max, double theta_norm, double variance);

/// Row-major flattening of theta; inverse of unflatten_theta.
Vector flatten_theta(const Matrix& theta);
Matrix unflatten_theta(const Vector& flat, Eigen::Index rows, Eigen::Index cols);

/// Unit vector in the direction of v, or zero when v vanishes.
Vector unit_direction(const Vector& v);

class GaussianLinearPolicy final : public PolicyFamily {
 public:
  GaussianLinearPolicy(std::shared_ptr<const StateFeatures> features, Eigen::Index action_dim,
                       double variance);

  Eigen::Index param_size() const override { return features_->dim() * action_dim_; }
  Action sample(const Vector& params, const State& s, Rng& rng) const override;
  Vector score(const Vector& params, const State& s, const Action& a) const override;
  double log_density(const Vector& params, const State& s, const Action& a) const override;

  /// Difference between the sampled and mean action directions, scaled by 1/c.
  double gradient_proxy(const Vector& params, const State& s, const Action& a) const override;

  // Variants reusing precomputed state features.
  Action mean_from_features(const Vector& params, const Vector& phi) const;
  Action sample_from_features(const Vector& params, const Vector& phi, Rng& rng) const;
  Vector score_from_features(const Vector& params, const Vector& phi, const Action& a) const;
  double proxy_from_features(const Vector& params, const Vector& phi, const Action& a) const;

  const StateFeatures& features() const { return *features_; }
  Eigen::Index action_dim() const { return action_dim_; }
  double variance() const { return variance_; }

 private:
  std::shared_ptr<const StateFeatures> features_;
  Eigen::Index action_dim_;
  double variance_;
};

// ---------------------------------------------------------------------------
// Softmax over per-(s, a) scores for finite MDPs; params indexed s * A + a.
// ---------------------------------------------------------------------------

class SoftmaxTabularPolicy final : public PolicyFamily {
 public:
  SoftmaxTabularPolicy(int num_states, int num_actions);

  Eigen::Index param_size() const override { return num_states_ * num_actions_; }
  Action sample(const Vector& params, const State& s, Rng& rng) const override;
  Vector score(const Vector& params, const State& s, const Action& a) const override;
  double log_density(const Vector& params, const State& s, const Action& a) const override;

  /// Action probabilities at state s.
  Vector probabilities(const Vector& params, int s) const;
  /// S x A probability table.
  Matrix table(const Vector& params) const;

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }

 private:
  int num_states_;
  int num_actions_;
};

}  // namespace acrl
