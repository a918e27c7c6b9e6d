#pragma once

#include "acrl/features.hpp"
#include "acrl/finite_mdp.hpp"
#include "acrl/policy.hpp"

namespace acrl {

// Exact computations on finite MDPs by enumeration and dense linear solves.
// Pair-indexed vectors use the index s * A + a.

/// M[(s, a), (s', a')] = P(s' | s, a) pi(a' | s').
Matrix pair_transition_matrix(const FiniteMdp& m, const TabularPolicy& pi);
/// P_pi[s, s'] = sum_a pi(a | s) P(s' | s, a).
Matrix state_transition_matrix(const FiniteMdp& m, const TabularPolicy& pi);

/// Solves Q = R + gamma M Q. Returned as an S x A table.
Matrix exact_q(const FiniteMdp& m, const TabularPolicy& pi);
Vector exact_v(const FiniteMdp& m, const TabularPolicy& pi);
/// J = V(start state).
double objective(const FiniteMdp& m, const TabularPolicy& pi);
double objective(const FiniteMdp& m, const PolicyFamily& family, const Vector& params);

/// Normalized discounted state occupancy (1 - gamma)(I - gamma P_pi^T)^-1 e_s0.
Vector occupancy(const FiniteMdp& m, const TabularPolicy& pi, int s0);
/// Stationary distribution of the policy chain P_pi.
Vector stationary_distribution(const FiniteMdp& m, const TabularPolicy& pi);
/// d(s) pi(a | s) over pairs.
Vector stationary_pair_weights(const FiniteMdp& m, const TabularPolicy& pi);

/// (1 / (1 - gamma)) sum_{s,a} rho(s) pi(a|s) score(s, a) Q(s, a), with rho
/// the occupancy from the start state.
Vector exact_gradient(const FiniteMdp& m, const PolicyFamily& family, const Vector& params);

/// A = E[phi (phi - gamma phi')^T], b = E[r phi] under stationary pair weights.
struct TdSystem {
  Matrix a;
  Vector b;
};
TdSystem td_system(const FiniteMdp& m, const TabularPolicy& pi, const TabularFeatureMap& phi);
/// xi* = A^-1 b. Throws FeatureRankError when A is singular.
Vector td_fixed_point(const FiniteMdp& m, const TabularPolicy& pi, const TabularFeatureMap& phi);
/// E[delta(xi) phi] by enumeration.
Vector expected_td_direction(const FiniteMdp& m, const TabularPolicy& pi,
                             const TabularFeatureMap& phi, const Vector& xi);

/// Smallest eigenvalue of sum_i w_i rows_i rows_i^T.
double feature_covariance_min_eig(const Vector& weights, const Matrix& rows);
/// Smallest eigenvalue of the stationary-weighted feature covariance.
/// Throws FeatureRankError when it is not positive.
double min_eig_omega(const FiniteMdp& m, const TabularPolicy& pi, const TabularFeatureMap& phi);

/// Per-pair inner expectations of the compositional Bellman objective:
/// E[g | s, a] = R(s, a) + xi^T dbar(s, a), dbar = gamma E[phi' | s, a] - phi(s, a).
struct BellmanTerms {
  Vector weights;  // stationary pair weights mu
  Vector reward;   // R flattened over pairs
  Matrix dbar;     // pairs x p, rows are E[grad g | s, a]
};
BellmanTerms bellman_terms(const FiniteMdp& m, const TabularPolicy& pi,
                           const TabularFeatureMap& phi);

/// F(xi) = sum mu (E[g | s, a])^2.
double bellman_error(const BellmanTerms& terms, const Vector& xi);
/// 2 sum mu E[grad g] E[g].
Vector bellman_error_gradient(const BellmanTerms& terms, const Vector& xi);
/// Smallest eigenvalue of sum mu dbar dbar^T; F grows quadratically at this
/// rate around its minimizer.
double bellman_growth_modulus(const BellmanTerms& terms);

double bellman_error(const FiniteMdp& m, const TabularPolicy& pi, const TabularFeatureMap& phi,
                     const Vector& xi);
Vector bellman_error_gradient(const FiniteMdp& m, const TabularPolicy& pi,
                              const TabularFeatureMap& phi, const Vector& xi);

}  // namespace acrl
