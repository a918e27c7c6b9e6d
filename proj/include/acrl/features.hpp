#pragma once

#include "acrl/types.hpp"

#include <vector>

namespace acrl {

/// Gaussian kernel exp(-|s - c|^2 / (2 bandwidth^2)). Throws ConfigError for
/// a nonpositive bandwidth.
double rbf_kernel(const Vector& s, const Vector& center, double bandwidth);

/// Even 2-D lattice of per_axis x per_axis points on [lower, upper]^2,
/// endpoints included. per_axis == 1 yields the single midpoint.
std::vector<Vector> grid_centers(double lower, double upper, int per_axis);

/// Feature map over states.
class StateFeatures {
 public:
  virtual ~StateFeatures() = default;
  virtual Eigen::Index dim() const = 0;
  virtual Vector operator()(const State& s) const = 0;
};

/// Feature map over state-action pairs, used by the critic.
class StateActionFeatures {
 public:
  virtual ~StateActionFeatures() = default;
  virtual Eigen::Index dim() const = 0;
  virtual Vector operator()(const State& s, const Action& a) const = 0;
};

/// Stacked kernel values against a fixed set of centers. With normalize set
/// every feature vector has unit Euclidean norm.
class RbfFeatureMap final : public StateFeatures {
 public:
  RbfFeatureMap(std::vector<Vector> centers, double bandwidth, bool normalize = true);

  /// Default navigation grid: per_axis^2 centers on [lower, upper]^2.
  static RbfFeatureMap grid(double lower, double upper, int per_axis, double bandwidth,
                            bool normalize = true);

  Eigen::Index dim() const override { return centers_.cols(); }
  Vector operator()(const State& s) const override;

  const Matrix& centers() const { return centers_; }
  double bandwidth() const { return bandwidth_; }
  bool normalized() const { return normalize_; }

 private:
  Matrix centers_;  // one center per column
  double bandwidth_;
  bool normalize_;
};

/// Critic features that ignore the action.
class StateOnlyFeatures final : public StateActionFeatures {
 public:
  explicit StateOnlyFeatures(const StateFeatures& base) : base_(base) {}
  Eigen::Index dim() const override { return base_.dim(); }
  Vector operator()(const State& s, const Action&) const override { return base_(s); }

 private:
  const StateFeatures& base_;
};

/// Explicit feature row per (s, a) pair of a finite MDP, indexed s * A + a.
class TabularFeatureMap final : public StateActionFeatures {
 public:
  /// rows: (S * A) x p. Throws FeatureRankError when rows lack full column rank.
  TabularFeatureMap(int num_states, int num_actions, Matrix rows);

  /// One-hot features, p = S * A.
  static TabularFeatureMap one_hot(int num_states, int num_actions);

  Eigen::Index dim() const override { return rows_.cols(); }
  Vector operator()(const State& s, const Action& a) const override;

  int pair_index(int s, int a) const { return s * num_actions_ + a; }
  auto row(int s, int a) const { return rows_.row(pair_index(s, a)); }
  const Matrix& rows() const { return rows_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }

 private:
  int num_states_;
  int num_actions_;
  Matrix rows_;
};

}  // namespace acrl
