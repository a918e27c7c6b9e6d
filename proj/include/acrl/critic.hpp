#pragma once

#include "acrl/env.hpp"
#include "acrl/features.hpp"
#include "acrl/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace acrl {

enum class CriticMethod { td0, gtd, agtd };

std::string to_string(CriticMethod method);
/// Accepts "td0", "gtd", "agtd"; throws ConfigError otherwise.
CriticMethod parse_critic_method(std::string_view name);

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

/// Running estimate of an inner expectation. GTD stores z here, A-GTD
/// stores y. `anchor` is the critic parameter right after the slot's
/// previous update; A-GTD extrapolates from it.
struct TrackerSlot {
  double value = 0.0;
  long visits = 0;
  Vector anchor;
};

struct CriticState {
  Vector xi;
  std::vector<TrackerSlot> trackers;
  Vector extrapolated;  // A-GTD: the extrapolated point z of the latest step
  long t = 0;

  static CriticState zeros(Eigen::Index feature_dim, int tracker_slots = 1);
};

/// phi(s, a) and phi(s', a') of one transition.
struct FeaturePair {
  Vector current;
  Vector next;
};

struct UpdateContext {
  double gamma = 0.9;
  double radius = 20.0;      // projection radius R_Xi; infinity disables
  double lambda_reg = 0.0;   // GTD regularizer
};

// ---------------------------------------------------------------------------
// Update rules. Each returns the successor state; t and the slot's visit
// counter advance by one.
// ---------------------------------------------------------------------------

Vector project_critic(const Vector& xi, double radius);
double q_value(const Vector& xi, const Vector& phi);

/// delta = r + xi^T (gamma phi' - phi);  xi <- Proj(xi + alpha delta phi).
CriticState td0_step(CriticState c, const FeaturePair& f, double r, double alpha,
                     const UpdateContext& ctx);

/// z <- (1 - beta) z + beta delta;
/// xi <- Proj((1 - lambda alpha) xi - 2 alpha z (gamma phi' - phi)).
CriticState gtd_step(CriticState c, const FeaturePair& f, double r, double alpha, double beta,
                     const UpdateContext& ctx, int slot = 0);

/// xi+ = Proj(xi - 2 alpha (gamma phi' - phi) y);
/// z+ = -(1/beta - 1) anchor + (1/beta) xi+;
/// y+ = (1 - beta) y + beta (r + z+^T (gamma phi' - phi)).
CriticState agtd_step(CriticState c, const FeaturePair& f, double r, double alpha, double beta,
                      const UpdateContext& ctx, int slot = 0);

// ---------------------------------------------------------------------------
// Step sizes
// ---------------------------------------------------------------------------

struct StepSizes {
  double alpha = 0.0;
  std::optional<double> beta;
};

struct TdFiniteConstants {
  double beta;    // 2 / (omega (1 - gamma))
  double lambda;  // 16 / (omega (1 - gamma)^2)
};

TdFiniteConstants td_finite_constants(double omega, double gamma);

class StepSchedule {
 public:
  enum class Kind { constant, td_continuous, td_finite, gtd, agtd };

  /// alpha_t = alpha.
  static StepSchedule constant(double alpha);
  /// alpha_t = (t + 1)^-exponent.
  static StepSchedule td_continuous(double exponent = 0.5);
  /// alpha_t = beta_c / (lambda_c + t); requires omega.
  static StepSchedule td_finite(std::optional<double> omega, double gamma);
  /// alpha_t = scale / t, beta_t = t^-2/3.
  static StepSchedule gtd(double alpha_scale = 1.0);
  /// alpha_t = scale / t, beta_t = t^-4/5.
  static StepSchedule agtd(double alpha_scale = 1.0);

  Kind kind() const { return kind_; }
  double alpha(long t) const;
  std::optional<double> beta(long t) const;
  bool has_beta() const { return kind_ == Kind::gtd || kind_ == Kind::agtd; }

  std::string describe() const;

 private:
  StepSchedule(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  Kind kind_;
  double a_;  // constant alpha, exponent, beta_c, or alpha scale
  double b_;  // lambda_c for td_finite
};

/// Throws ConfigError for t < 1.
StepSizes step_size(const StepSchedule& schedule, long t);

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

/// Assignment of transitions to tracker slots. A single pooled slot is the
/// plain scalar tracker; finite MDPs may track one slot per (s, a) pair.
struct TrackerLayout {
  int slots = 1;
  std::function<int(const State&, const Action&)> slot_of;

  static TrackerLayout pooled() { return {}; }
  int operator()(const State& s, const Action& a) const { return slot_of ? slot_of(s, a) : 0; }
};

struct CriticConfig {
  CriticMethod method = CriticMethod::td0;
  StepSchedule schedule = StepSchedule::constant(0.05);
  double radius = 20.0;
  double lambda_reg = 0.0;
};

class Critic {
 public:
  Critic(CriticConfig config, Eigen::Index feature_dim, double gamma,
         TrackerLayout layout = TrackerLayout::pooled());

  /// One update; alpha uses the global step count, beta the slot's visits.
  void update(const FeaturePair& features, double reward, int slot = 0);
  void update(const TransitionTuple& tup, const StateActionFeatures& features);

  /// Zero the trackers (z or y) and re-anchor them at the current xi.
  void reset_trackers();
  /// Step counters back to zero; xi is kept.
  void reset_clock();
  /// Back to xi = 0 with fresh step counters.
  void restart();

  double q(const Vector& phi) const { return q_value(state_.xi, phi); }
  const Vector& xi() const { return state_.xi; }
  const CriticState& state() const { return state_; }
  long steps() const { return state_.t; }
  /// Updates performed since construction, unaffected by clock resets.
  long steps_total() const { return total_; }
  const CriticConfig& config() const { return config_; }
  const TrackerLayout& layout() const { return layout_; }

 private:
  CriticConfig config_;
  UpdateContext ctx_;
  TrackerLayout layout_;
  CriticState state_;
  long total_ = 0;
};

}  // namespace acrl
