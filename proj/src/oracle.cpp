#include "acrl/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

namespace acrl {

Matrix pair_transition_matrix(const FiniteMdp& m, const TabularPolicy& pi) {
  const int S = m.num_states;
  const int A = m.num_actions;
  Matrix M(m.num_pairs(), m.num_pairs());
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a)
      for (int s2 = 0; s2 < S; ++s2)
        for (int a2 = 0; a2 < A; ++a2)
          M(m.pair_index(s, a), m.pair_index(s2, a2)) = m.p(s, a, s2) * pi(s2, a2);
  return M;
}

Matrix state_transition_matrix(const FiniteMdp& m, const TabularPolicy& pi) {
  const int S = m.num_states;
  Matrix P = Matrix::Zero(S, S);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < m.num_actions; ++a)
      for (int s2 = 0; s2 < S; ++s2) P(s, s2) += pi(s, a) * m.p(s, a, s2);
  return P;
}

namespace {

Vector flat_rewards(const FiniteMdp& m) {
  Vector r(m.num_pairs());
  for (int s = 0; s < m.num_states; ++s)
    for (int a = 0; a < m.num_actions; ++a) r[m.pair_index(s, a)] = m.rewards(s, a);
  return r;
}

}  // namespace

Matrix exact_q(const FiniteMdp& m, const TabularPolicy& pi) {
  const int n = m.num_pairs();
  const Matrix system = Matrix::Identity(n, n) - m.gamma * pair_transition_matrix(m, pi);
  const Vector q = system.partialPivLu().solve(flat_rewards(m));
  Matrix table(m.num_states, m.num_actions);
  for (int s = 0; s < m.num_states; ++s)
    for (int a = 0; a < m.num_actions; ++a) table(s, a) = q[m.pair_index(s, a)];
  return table;
}

Vector exact_v(const FiniteMdp& m, const TabularPolicy& pi) {
  return exact_q(m, pi).cwiseProduct(pi.probs).rowwise().sum();
}

double objective(const FiniteMdp& m, const TabularPolicy& pi) {
  return exact_v(m, pi)[m.start_state];
}

double objective(const FiniteMdp& m, const PolicyFamily& family, const Vector& params) {
  return objective(m, TabularPolicy::from_family(family, params, m.num_states, m.num_actions));
}

Vector occupancy(const FiniteMdp& m, const TabularPolicy& pi, int s0) {
  const int S = m.num_states;
  if (s0 < 0 || s0 >= S) throw ConfigError("occupancy: start state out of range");
  const Matrix system =
      Matrix::Identity(S, S) - m.gamma * state_transition_matrix(m, pi).transpose();
  return (1.0 - m.gamma) * system.partialPivLu().solve(Vector::Unit(S, s0));
}

Vector stationary_distribution(const FiniteMdp& m, const TabularPolicy& pi) {
  const int S = m.num_states;
  Matrix system(S + 1, S);
  system.topRows(S) = (state_transition_matrix(m, pi) - Matrix::Identity(S, S)).transpose();
  system.row(S).setOnes();
  Vector rhs = Vector::Zero(S + 1);
  rhs[S] = 1.0;
  return system.colPivHouseholderQr().solve(rhs);
}

Vector stationary_pair_weights(const FiniteMdp& m, const TabularPolicy& pi) {
  const Vector d = stationary_distribution(m, pi);
  Vector w(m.num_pairs());
  for (int s = 0; s < m.num_states; ++s)
    for (int a = 0; a < m.num_actions; ++a) w[m.pair_index(s, a)] = d[s] * pi(s, a);
  return w;
}

Vector exact_gradient(const FiniteMdp& m, const PolicyFamily& family, const Vector& params) {
  const TabularPolicy pi =
      TabularPolicy::from_family(family, params, m.num_states, m.num_actions);
  const Matrix q = exact_q(m, pi);
  const Vector rho = occupancy(m, pi, m.start_state);
  Vector grad = Vector::Zero(family.param_size());
  for (int s = 0; s < m.num_states; ++s)
    for (int a = 0; a < m.num_actions; ++a)
      grad += rho[s] * pi(s, a) * q(s, a) *
              family.score(params, scalar_vector(s), scalar_vector(a));
  return grad / (1.0 - m.gamma);
}

// ---------------------------------------------------------------------------

namespace {

/// gamma E[phi(s', a') | s, a] - phi(s, a), one row per pair.
Matrix expected_feature_difference(const FiniteMdp& m, const TabularPolicy& pi,
                                   const TabularFeatureMap& phi) {
  if (phi.num_states() != m.num_states || phi.num_actions() != m.num_actions)
    throw ConfigError("feature map does not match the MDP");
  return m.gamma * pair_transition_matrix(m, pi) * phi.rows() - phi.rows();
}

}  // namespace

TdSystem td_system(const FiniteMdp& m, const TabularPolicy& pi, const TabularFeatureMap& phi) {
  const Vector w = stationary_pair_weights(m, pi);
  const Matrix dbar = expected_feature_difference(m, pi, phi);
  const Matrix weighted = phi.rows().transpose() * w.asDiagonal();
  return {-(weighted * dbar), weighted * flat_rewards(m)};
}

Vector td_fixed_point(const FiniteMdp& m, const TabularPolicy& pi, const TabularFeatureMap& phi) {
  const TdSystem sys = td_system(m, pi, phi);
  Eigen::FullPivLU<Matrix> lu(sys.a);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) throw FeatureRankError("TD system matrix A is singular");
  return lu.solve(sys.b);
}

Vector expected_td_direction(const FiniteMdp& m, const TabularPolicy& pi,
                             const TabularFeatureMap& phi, const Vector& xi) {
  const TdSystem sys = td_system(m, pi, phi);
  return sys.b - sys.a * xi;
}

double feature_covariance_min_eig(const Vector& weights, const Matrix& rows) {
  const Matrix cov = rows.transpose() * weights.asDiagonal() * rows;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()[0];
}

double min_eig_omega(const FiniteMdp& m, const TabularPolicy& pi, const TabularFeatureMap& phi) {
  const double omega = feature_covariance_min_eig(stationary_pair_weights(m, pi), phi.rows());
  if (!(omega > 1e-12)) throw FeatureRankError("feature covariance is singular (omega <= 0)");
  return omega;
}

// ---------------------------------------------------------------------------

BellmanTerms bellman_terms(const FiniteMdp& m, const TabularPolicy& pi,
                           const TabularFeatureMap& phi) {
  return {stationary_pair_weights(m, pi), flat_rewards(m),
          expected_feature_difference(m, pi, phi)};
}

double bellman_error(const BellmanTerms& t, const Vector& xi) {
  const Vector g = t.reward + t.dbar * xi;
  return t.weights.dot(g.cwiseProduct(g));
}

Vector bellman_error_gradient(const BellmanTerms& t, const Vector& xi) {
  const Vector g = t.reward + t.dbar * xi;
  return 2.0 * t.dbar.transpose() * t.weights.cwiseProduct(g);
}

double bellman_growth_modulus(const BellmanTerms& t) {
  return feature_covariance_min_eig(t.weights, t.dbar);
}

double bellman_error(const FiniteMdp& m, const TabularPolicy& pi, const TabularFeatureMap& phi,
                     const Vector& xi) {
  return bellman_error(bellman_terms(m, pi, phi), xi);
}

Vector bellman_error_gradient(const FiniteMdp& m, const TabularPolicy& pi,
                              const TabularFeatureMap& phi, const Vector& xi) {
  return bellman_error_gradient(bellman_terms(m, pi, phi), xi);
}

}  // namespace acrl
