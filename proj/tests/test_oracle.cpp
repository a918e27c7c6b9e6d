#include "acrl/oracle.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace acrl;
using namespace acrl::testing;

namespace {

Vector random_vector(Eigen::Index n, Rng& rng, double scale = 1.0) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * rng.normal();
  return v;
}

struct Fixture {
  ReferenceInstance inst = make_reference_instance();
  SoftmaxTabularPolicy family{4, 2};
  TabularPolicy pi = TabularPolicy::softmax(inst.reference_logits, 4, 2);
};

}  // namespace

TEST(ExactQ, ZeroRewardsGiveZero) {
  FiniteMdp m = make_reference_instance().mdp;
  m.rewards.setZero();
  EXPECT_EQ(exact_q(m, TabularPolicy::uniform(4, 2)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ExactQ, SingleStateGeometricSeries) {
  FiniteMdp m;
  m.num_states = 1;
  m.num_actions = 1;
  m.transitions = {1.0};
  m.rewards = Matrix::Ones(1, 1);
  m.gamma = 0.9;
  EXPECT_NEAR(exact_q(m, TabularPolicy::uniform(1, 1))(0, 0), 10.0, 1e-12);
}

TEST(ExactQ, BellmanResidualAndBound) {
  Fixture f;
  const Matrix q = exact_q(f.inst.mdp, f.pi);
  const Matrix M = pair_transition_matrix(f.inst.mdp, f.pi);
  Vector qf(8), r(8);
  for (int s = 0; s < 4; ++s)
    for (int a = 0; a < 2; ++a) {
      qf[s * 2 + a] = q(s, a);
      r[s * 2 + a] = f.inst.mdp.rewards(s, a);
    }
  EXPECT_LE((qf - r - 0.9 * M * qf).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE(q.cwiseAbs().maxCoeff(), f.inst.mdp.reward_bound / (1 - 0.9));
}

TEST(ExactQ, ReferenceInstanceIsRealizable) {
  Fixture f;
  const Vector q = f.inst.features.rows() * f.inst.xi_true;
  const Matrix table = exact_q(f.inst.mdp, f.pi);
  for (int s = 0; s < 4; ++s)
    for (int a = 0; a < 2; ++a) EXPECT_NEAR(table(s, a), q[s * 2 + a], 1e-10);
  EXPECT_LE(f.inst.mdp.rewards.cwiseAbs().maxCoeff(), 1.0 + 1e-15);
}

TEST(Occupancy, ZeroDiscountIsStartState) {
  FiniteMdp m = make_reference_instance().mdp;
  m.gamma = 1e-12;
  const Vector rho = occupancy(m, TabularPolicy::uniform(4, 2), 2);
  EXPECT_LT((rho - Vector::Unit(4, 2)).norm(), 1e-10);
}

TEST(Occupancy, TwoStateClosedForm) {
  // Deterministic swap chain: state alternates, so rho = (1, gamma)(1 - gamma)/(1 - gamma^2).
  const double g = 0.9;
  const FiniteMdp m = two_state_chain(1.0, 1.0, g);
  const Vector rho = occupancy(m, TabularPolicy::uniform(2, 1), 0);
  EXPECT_NEAR(rho[0], 1.0 / (1.0 + g), 1e-12);
  EXPECT_NEAR(rho[1], g / (1.0 + g), 1e-12);
}

TEST(Occupancy, IsDistribution) {
  Fixture f;
  for (int s0 = 0; s0 < 4; ++s0) {
    const Vector rho = occupancy(f.inst.mdp, f.pi, s0);
    EXPECT_GE(rho.minCoeff(), 0.0);
    EXPECT_NEAR(rho.sum(), 1.0, 1e-10);
  }
}

TEST(Stationary, IsLeftEigenvector) {
  Fixture f;
  const Vector d = stationary_distribution(f.inst.mdp, f.pi);
  const Matrix P = state_transition_matrix(f.inst.mdp, f.pi);
  EXPECT_LT((P.transpose() * d - d).norm(), 1e-12);
  EXPECT_NEAR(d.sum(), 1.0, 1e-12);
  EXPECT_GE(d.minCoeff(), 0.0);
}

TEST(ExactGradient, MatchesFiniteDifferences) {
  Fixture f;
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector theta = random_vector(8, rng);
    const Vector g = exact_gradient(f.inst.mdp, f.family, theta);
    Vector fd(8);
    const double h = 1e-5;
    for (int i = 0; i < 8; ++i) {
      Vector up = theta, down = theta;
      up[i] += h;
      down[i] -= h;
      fd[i] = (objective(f.inst.mdp, f.family, up) - objective(f.inst.mdp, f.family, down)) / (2 * h);
    }
    EXPECT_LE(relative_error(g, fd), 1e-6);
  }
}

TEST(ExactGradient, SymmetricMdpStationaryPoint) {
  // Two mirror-image states, two actions with identical dynamics and rewards.
  FiniteMdp m;
  m.num_states = 2;
  m.num_actions = 2;
  m.gamma = 0.9;
  m.transitions = {0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
  m.rewards = Matrix::Constant(2, 2, 0.3);
  m.reward_bound = 1.0;
  const SoftmaxTabularPolicy family(2, 2);
  EXPECT_LT(exact_gradient(m, family, Vector::Zero(4)).norm(), 1e-14);
}

TEST(ExactGradient, DiagnosticBound) {
  Fixture f;
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector theta = random_vector(8, rng);
    // Softmax scores satisfy |e_a - pi| <= sqrt(2).
    const double bound = std::sqrt(2.0) * f.inst.mdp.reward_bound / ((1 - 0.9) * (1 - 0.9));
    EXPECT_LE(exact_gradient(f.inst.mdp, f.family, theta).norm(), bound);
  }
}

TEST(TdFixedPoint, OneHotFeaturesReproduceQ) {
  Fixture f;
  const TabularFeatureMap oh = TabularFeatureMap::one_hot(4, 2);
  const Vector xi = td_fixed_point(f.inst.mdp, f.pi, oh);
  const Matrix q = exact_q(f.inst.mdp, f.pi);
  for (int s = 0; s < 4; ++s)
    for (int a = 0; a < 2; ++a) EXPECT_NEAR(xi[s * 2 + a], q(s, a), 1e-10);
}

TEST(TdFixedPoint, ZeroRewardsGiveZero) {
  Fixture f;
  f.inst.mdp.rewards.setZero();
  EXPECT_LT(td_fixed_point(f.inst.mdp, f.pi, f.inst.features).norm(), 1e-14);
}

TEST(TdFixedPoint, ExpectedUpdateVanishes) {
  Fixture f;
  const TabularPolicy other = TabularPolicy::uniform(4, 2);
  for (const TabularPolicy& pi : {f.pi, other}) {
    const Vector xi = td_fixed_point(f.inst.mdp, pi, f.inst.features);
    EXPECT_LT(expected_td_direction(f.inst.mdp, pi, f.inst.features, xi).norm(), 1e-10);
  }
  EXPECT_LT((td_fixed_point(f.inst.mdp, f.pi, f.inst.features) - f.inst.xi_true).norm(), 1e-10);
}

TEST(Omega, OneHotUniformWeights) {
  const Vector w = Vector::Constant(6, 1.0 / 6);
  EXPECT_NEAR(feature_covariance_min_eig(w, Matrix::Identity(6, 6)), 1.0 / 6, 1e-14);
}

TEST(Omega, DuplicatedColumnIsSingular) {
  Matrix rows(4, 2);
  rows << 1, 1, 2, 2, 0.5, 0.5, -1, -1;
  EXPECT_NEAR(feature_covariance_min_eig(Vector::Constant(4, 0.25), rows), 0.0, 1e-12);
}

TEST(Omega, TwoByTwoByHand) {
  Matrix rows(2, 2);
  rows << 1, 0, 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  // Covariance [[3/4, 1/4], [1/4, 1/4]]: trace 1, determinant 1/8.
  const double hand = (1.0 - std::sqrt(1.0 - 4.0 / 8.0)) / 2.0;
  EXPECT_NEAR(feature_covariance_min_eig(Vector::Constant(2, 0.5), rows), hand, 1e-14);
}

TEST(Omega, ReferenceInstancePositive) {
  Fixture f;
  EXPECT_GT(min_eig_omega(f.inst.mdp, f.pi, f.inst.features), 0.0);
}

TEST(BellmanError, GradientVanishesAtFixedPoint) {
  Fixture f;
  const BellmanTerms terms = bellman_terms(f.inst.mdp, f.pi, f.inst.features);
  const Vector xi = td_fixed_point(f.inst.mdp, f.pi, f.inst.features);
  const double h = 1e-6;
  for (int i = 0; i < 3; ++i) {
    Vector up = xi, down = xi;
    up[i] += h;
    down[i] -= h;
    EXPECT_NEAR((bellman_error(terms, up) - bellman_error(terms, down)) / (2 * h), 0.0, 1e-8);
  }
  EXPECT_LT(bellman_error_gradient(terms, xi).norm(), 1e-10);
}

TEST(BellmanError, ZeroRewardAtOrigin) {
  Fixture f;
  f.inst.mdp.rewards.setZero();
  EXPECT_EQ(bellman_error(f.inst.mdp, f.pi, f.inst.features, Vector::Zero(3)), 0.0);
}

TEST(BellmanError, CompositionalGradientMatchesFiniteDifferences) {
  Fixture f;
  const BellmanTerms terms = bellman_terms(f.inst.mdp, f.pi, f.inst.features);
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector xi = random_vector(3, rng, 3.0);
    const Vector g = bellman_error_gradient(terms, xi);
    Vector fd(3);
    const double h = 1e-5;
    for (int i = 0; i < 3; ++i) {
      Vector up = xi, down = xi;
      up[i] += h;
      down[i] -= h;
      fd[i] = (bellman_error(terms, up) - bellman_error(terms, down)) / (2 * h);
    }
    EXPECT_LE(relative_error(g, fd), 1e-6);
  }
}

TEST(BellmanError, QuadraticGrowthModulus) {
  Fixture f;
  const BellmanTerms terms = bellman_terms(f.inst.mdp, f.pi, f.inst.features);
  const double sigma = bellman_growth_modulus(terms);
  EXPECT_GT(sigma, 0.0);
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const Vector xi = random_vector(3, rng, 2.0);
    EXPECT_GE(bellman_error(terms, xi) + 1e-12, sigma * (xi - f.inst.xi_true).squaredNorm());
  }
}

TEST(FiniteMdpFile, RoundTrip) {
  Fixture f;
  std::stringstream buf;
  write_finite_mdp(buf, f.inst.mdp, &f.inst.features.rows());
  const FiniteMdpFile file = read_finite_mdp(buf);
  EXPECT_EQ(file.mdp.num_states, 4);
  EXPECT_EQ(file.mdp.num_actions, 2);
  EXPECT_EQ(file.mdp.transitions, f.inst.mdp.transitions);
  EXPECT_EQ(file.mdp.rewards, f.inst.mdp.rewards);
  ASSERT_TRUE(file.features.has_value());
  EXPECT_EQ(*file.features, f.inst.features.rows());
}

TEST(FiniteMdpFile, RejectsNonStochasticRows) {
  std::stringstream buf("1 1 0.9 0\n0.8\n1.0\n");
  EXPECT_THROW(read_finite_mdp(buf), ConfigError);
  std::stringstream truncated("2 1 0.9 0\n1 0\n");
  EXPECT_THROW(read_finite_mdp(truncated), ConfigError);
}

TEST(StationarySampler, PairFrequencies) {
  Fixture f;
  const StationarySampler sampler(f.inst.mdp);
  const Vector w = stationary_pair_weights(f.inst.mdp, f.pi);
  Rng rng(5);
  Vector counts = Vector::Zero(8);
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const TransitionTuple t = sampler.sample(f.family, f.inst.reference_logits, rng);
    counts[static_cast<int>(t.s[0]) * 2 + static_cast<int>(t.a[0])] += 1;
  }
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(counts[i] / n, w[i], 4 * std::sqrt(w[i] / n));
}
