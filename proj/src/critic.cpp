#include "acrl/critic.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace acrl {

std::string to_string(CriticMethod method) {
  switch (method) {
    case CriticMethod::td0: return "td0";
    case CriticMethod::gtd: return "gtd";
    case CriticMethod::agtd: return "agtd";
  }
  return "unknown";
}

CriticMethod parse_critic_method(std::string_view name) {
  if (name == "td0") return CriticMethod::td0;
  if (name == "gtd") return CriticMethod::gtd;
  if (name == "agtd") return CriticMethod::agtd;
  throw ConfigError("unknown critic method '" + std::string(name) + "' (td0|gtd|agtd)");
}

CriticState CriticState::zeros(Eigen::Index feature_dim, int tracker_slots) {
  if (tracker_slots < 1) throw ConfigError("critic needs at least one tracker slot");
  CriticState c;
  c.xi = Vector::Zero(feature_dim);
  c.trackers.assign(static_cast<std::size_t>(tracker_slots),
                    TrackerSlot{0.0, 0, Vector::Zero(feature_dim)});
  c.extrapolated = Vector::Zero(feature_dim);
  return c;
}

Vector project_critic(const Vector& xi, double radius) {
  if (!(radius > 0.0)) throw ConfigError("projection radius must be positive");
  const double norm = xi.norm();
  if (norm <= radius * (1.0 + 1e-12)) return xi;
  return xi * (radius / norm);
}

double q_value(const Vector& xi, const Vector& phi) { return xi.dot(phi); }

namespace {

Vector td_direction(const FeaturePair& f, double gamma) { return gamma * f.next - f.current; }

TrackerSlot& slot_at(CriticState& c, int slot) {
  if (slot < 0 || static_cast<std::size_t>(slot) >= c.trackers.size())
    throw ConfigError("tracker slot out of range");
  return c.trackers[static_cast<std::size_t>(slot)];
}

}  // namespace

CriticState td0_step(CriticState c, const FeaturePair& f, double r, double alpha,
                     const UpdateContext& ctx) {
  const double delta = r + c.xi.dot(td_direction(f, ctx.gamma));
  c.xi = project_critic(c.xi + alpha * delta * f.current, ctx.radius);
  ++c.t;
  return c;
}

CriticState gtd_step(CriticState c, const FeaturePair& f, double r, double alpha, double beta,
                     const UpdateContext& ctx, int slot) {
  TrackerSlot& z = slot_at(c, slot);
  const Vector direction = td_direction(f, ctx.gamma);
  const double delta = r + c.xi.dot(direction);
  z.value = (1.0 - beta) * z.value + beta * delta;
  c.xi = project_critic((1.0 - ctx.lambda_reg * alpha) * c.xi - 2.0 * alpha * z.value * direction,
                        ctx.radius);
  z.anchor = c.xi;
  ++z.visits;
  ++c.t;
  return c;
}

CriticState agtd_step(CriticState c, const FeaturePair& f, double r, double alpha, double beta,
                      const UpdateContext& ctx, int slot) {
  TrackerSlot& y = slot_at(c, slot);
  const Vector direction = td_direction(f, ctx.gamma);
  c.xi = project_critic(c.xi - 2.0 * alpha * y.value * direction, ctx.radius);
  c.extrapolated = (1.0 - 1.0 / beta) * y.anchor + (1.0 / beta) * c.xi;
  y.value = (1.0 - beta) * y.value + beta * (r + c.extrapolated.dot(direction));
  y.anchor = c.xi;
  ++y.visits;
  ++c.t;
  return c;
}

// ---------------------------------------------------------------------------

TdFiniteConstants td_finite_constants(double omega, double gamma) {
  if (!(omega > 0.0)) throw ConfigError("td_finite schedule needs omega > 0");
  validate_discount(gamma);
  const double gap = 1.0 - gamma;
  return {2.0 / (omega * gap), 16.0 / (omega * gap * gap)};
}

StepSchedule StepSchedule::constant(double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("constant step size must be positive");
  return {Kind::constant, alpha, 0.0};
}

StepSchedule StepSchedule::td_continuous(double exponent) {
  if (!(exponent > 0.0 && exponent <= 1.0))
    throw ConfigError("td_continuous exponent must lie in (0, 1]");
  return {Kind::td_continuous, exponent, 0.0};
}

StepSchedule StepSchedule::td_finite(std::optional<double> omega, double gamma) {
  if (!omega) throw ConfigError("td_finite schedule requires omega");
  const TdFiniteConstants k = td_finite_constants(*omega, gamma);
  return {Kind::td_finite, k.beta, k.lambda};
}

StepSchedule StepSchedule::gtd(double alpha_scale) {
  if (!(alpha_scale > 0.0)) throw ConfigError("gtd alpha scale must be positive");
  return {Kind::gtd, alpha_scale, 0.0};
}

StepSchedule StepSchedule::agtd(double alpha_scale) {
  if (!(alpha_scale > 0.0)) throw ConfigError("agtd alpha scale must be positive");
  return {Kind::agtd, alpha_scale, 0.0};
}

double StepSchedule::alpha(long t) const {
  const double td = static_cast<double>(t);
  switch (kind_) {
    case Kind::constant: return a_;
    case Kind::td_continuous: return std::pow(td + 1.0, -a_);
    case Kind::td_finite: return a_ / (b_ + td);
    case Kind::gtd:
    case Kind::agtd: return a_ / td;
  }
  return 0.0;
}

std::optional<double> StepSchedule::beta(long t) const {
  const double td = static_cast<double>(t);
  switch (kind_) {
    case Kind::gtd: return std::pow(td, -2.0 / 3.0);
    case Kind::agtd: return std::pow(td, -4.0 / 5.0);
    default: return std::nullopt;
  }
}

std::string StepSchedule::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::constant: out << "constant(" << a_ << ")"; break;
    case Kind::td_continuous: out << "td_continuous(" << a_ << ")"; break;
    case Kind::td_finite: out << "td_finite(beta=" << a_ << ", lambda=" << b_ << ")"; break;
    case Kind::gtd: out << "gtd(scale=" << a_ << ")"; break;
    case Kind::agtd: out << "agtd(scale=" << a_ << ")"; break;
  }
  return out.str();
}

StepSizes step_size(const StepSchedule& schedule, long t) {
  if (t < 1) throw ConfigError("step-size schedules are indexed from t = 1");
  return {schedule.alpha(t), schedule.beta(t)};
}

// ---------------------------------------------------------------------------

Critic::Critic(CriticConfig config, Eigen::Index feature_dim, double gamma, TrackerLayout layout)
    : config_(std::move(config)), layout_(std::move(layout)) {
  validate_discount(gamma);
  if (feature_dim < 1) throw ConfigError("critic feature dimension must be positive");
  if (!(config_.radius > 0.0)) throw ConfigError("projection radius must be positive");
  if (config_.method != CriticMethod::td0 && !config_.schedule.has_beta())
    throw ConfigError(to_string(config_.method) + " critic needs a schedule with beta_t, got " +
                      config_.schedule.describe());
  ctx_ = {gamma, config_.radius, config_.lambda_reg};
  state_ = CriticState::zeros(feature_dim, layout_.slots);
}

void Critic::update(const FeaturePair& features, double reward, int slot) {
  ++total_;
  const double alpha = config_.schedule.alpha(state_.t + 1);
  switch (config_.method) {
    case CriticMethod::td0:
      state_ = td0_step(std::move(state_), features, reward, alpha, ctx_);
      break;
    case CriticMethod::gtd: {
      const long visits = state_.trackers.at(static_cast<std::size_t>(slot)).visits + 1;
      state_ = gtd_step(std::move(state_), features, reward, alpha,
                        *config_.schedule.beta(visits), ctx_, slot);
      break;
    }
    case CriticMethod::agtd: {
      const long visits = state_.trackers.at(static_cast<std::size_t>(slot)).visits + 1;
      state_ = agtd_step(std::move(state_), features, reward, alpha,
                         *config_.schedule.beta(visits), ctx_, slot);
      break;
    }
  }
}

void Critic::update(const TransitionTuple& tup, const StateActionFeatures& features) {
  update(FeaturePair{features(tup.s, tup.a), features(tup.s_next, tup.a_next)}, tup.r,
         layout_(tup.s, tup.a));
}

void Critic::reset_trackers() {
  for (TrackerSlot& slot : state_.trackers) {
    slot.value = 0.0;
    slot.anchor = state_.xi;
  }
}

void Critic::reset_clock() {
  state_.t = 0;
  for (TrackerSlot& slot : state_.trackers) slot.visits = 0;
}

void Critic::restart() {
  state_ = CriticState::zeros(state_.xi.size(), layout_.slots);
}

}  // namespace acrl
