#include "acrl/policy.hpp"

#include <cmath>
#include <numbers>

namespace acrl {

namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajorMatrix> theta_view(const Vector& flat, Eigen::Index rows,
                                            Eigen::Index cols) {
  return Eigen::Map<const RowMajorMatrix>(flat.data(), rows, cols);
}

void check_variance(double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw ConfigError("policy variance must be positive and finite");
}

int as_index(const Vector& v) { return static_cast<int>(v[0]); }

}  // namespace

PolicyParams PolicyParams::zeros(Eigen::Index features, Eigen::Index action_dim,
                                 double variance) {
  PolicyParams params{Matrix::Zero(features, action_dim), variance};
  params.validate();
  return params;
}

void PolicyParams::validate() const {
  check_variance(variance);
  if (!theta.allFinite()) throw NumericalError("policy parameters are not finite");
}

Action policy_mean(const PolicyParams& params, const Vector& phi) {
  return params.theta.transpose() * phi;
}

Action sample_action(const PolicyParams& params, const Vector& phi, Rng& rng) {
  Action a = policy_mean(params, phi);
  const double scale = std::sqrt(params.variance);
  for (Eigen::Index i = 0; i < a.size(); ++i) a[i] += scale * rng.normal();
  return a;
}

Matrix score(const PolicyParams& params, const Vector& phi, const Action& a) {
  return phi * ((a - policy_mean(params, phi)) / params.variance).transpose();
}

double log_density(const PolicyParams& params, const Vector& phi, const Action& a) {
  const double d = static_cast<double>(a.size());
  const double c = params.variance;
  return -0.5 * d * std::log(2.0 * std::numbers::pi * c) -
         (a - policy_mean(params, phi)).squaredNorm() / (2.0 * c);
}

double score_norm_bound(double a_max, double theta_norm, double variance) {
  check_variance(variance);
  return (a_max + theta_norm) / variance;
}

Vector flatten_theta(const Matrix& theta) {
  Vector flat(theta.size());
  Eigen::Map<RowMajorMatrix>(flat.data(), theta.rows(), theta.cols()) = theta;
  return flat;
}

Matrix unflatten_theta(const Vector& flat, Eigen::Index rows, Eigen::Index cols) {
  if (flat.size() != rows * cols) throw ConfigError("flat parameter size mismatch");
  return theta_view(flat, rows, cols);
}

Vector unit_direction(const Vector& v) {
  const double n = v.norm();
  if (n == 0.0) return Vector::Zero(v.size());
  return v / n;
}

// ---------------------------------------------------------------------------

GaussianLinearPolicy::GaussianLinearPolicy(std::shared_ptr<const StateFeatures> features,
                                           Eigen::Index action_dim, double variance)
    : features_(std::move(features)), action_dim_(action_dim), variance_(variance) {
  if (!features_) throw ConfigError("gaussian policy needs a feature map");
  if (action_dim < 1) throw ConfigError("action dimension must be positive");
  check_variance(variance);
}

Action GaussianLinearPolicy::mean_from_features(const Vector& params, const Vector& phi) const {
  return theta_view(params, features_->dim(), action_dim_).transpose() * phi;
}

Action GaussianLinearPolicy::sample_from_features(const Vector& params, const Vector& phi,
                                                  Rng& rng) const {
  Action a = mean_from_features(params, phi);
  const double scale = std::sqrt(variance_);
  for (Eigen::Index i = 0; i < a.size(); ++i) a[i] += scale * rng.normal();
  return a;
}

Vector GaussianLinearPolicy::score_from_features(const Vector& params, const Vector& phi,
                                                 const Action& a) const {
  const Vector residual = (a - mean_from_features(params, phi)) / variance_;
  Vector grad(param_size());
  Eigen::Map<RowMajorMatrix>(grad.data(), phi.size(), action_dim_) = phi * residual.transpose();
  return grad;
}

double GaussianLinearPolicy::proxy_from_features(const Vector& params, const Vector& phi,
                                                 const Action& a) const {
  return (unit_direction(a) - unit_direction(mean_from_features(params, phi))).norm() /
         variance_;
}

Action GaussianLinearPolicy::sample(const Vector& params, const State& s, Rng& rng) const {
  return sample_from_features(params, (*features_)(s), rng);
}

Vector GaussianLinearPolicy::score(const Vector& params, const State& s, const Action& a) const {
  return score_from_features(params, (*features_)(s), a);
}

double GaussianLinearPolicy::log_density(const Vector& params, const State& s,
                                         const Action& a) const {
  const PolicyParams p{unflatten_theta(params, features_->dim(), action_dim_), variance_};
  return acrl::log_density(p, (*features_)(s), a);
}

double GaussianLinearPolicy::gradient_proxy(const Vector& params, const State& s,
                                            const Action& a) const {
  return proxy_from_features(params, (*features_)(s), a);
}

// ---------------------------------------------------------------------------

SoftmaxTabularPolicy::SoftmaxTabularPolicy(int num_states, int num_actions)
    : num_states_(num_states), num_actions_(num_actions) {
  if (num_states < 1 || num_actions < 1) throw ConfigError("softmax policy needs S, A >= 1");
}

Vector SoftmaxTabularPolicy::probabilities(const Vector& params, int s) const {
  const auto logits = params.segment(static_cast<Eigen::Index>(s) * num_actions_, num_actions_);
  Vector p = (logits.array() - logits.maxCoeff()).exp().matrix();
  return p / p.sum();
}

Matrix SoftmaxTabularPolicy::table(const Vector& params) const {
  Matrix t(num_states_, num_actions_);
  for (int s = 0; s < num_states_; ++s) t.row(s) = probabilities(params, s).transpose();
  return t;
}

Action SoftmaxTabularPolicy::sample(const Vector& params, const State& s, Rng& rng) const {
  const Vector p = probabilities(params, as_index(s));
  double u = rng.uniform();
  int a = 0;
  for (; a < num_actions_ - 1; ++a) {
    u -= p[a];
    if (u < 0.0) break;
  }
  return scalar_vector(a);
}

Vector SoftmaxTabularPolicy::score(const Vector& params, const State& s, const Action& a) const {
  const int si = as_index(s);
  Vector grad = Vector::Zero(param_size());
  grad.segment(static_cast<Eigen::Index>(si) * num_actions_, num_actions_) =
      -probabilities(params, si);
  grad[static_cast<Eigen::Index>(si) * num_actions_ + as_index(a)] += 1.0;
  return grad;
}

double SoftmaxTabularPolicy::log_density(const Vector& params, const State& s,
                                         const Action& a) const {
  return std::log(probabilities(params, as_index(s))[as_index(a)]);
}

}  // namespace acrl
