#include "acrl/policy.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace acrl;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double scale = 1.0) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = scale * rng.normal();
  return m;
}

Vector random_unit(Eigen::Index n, Rng& rng) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = std::abs(rng.normal()) + 0.01;
  return v.normalized();
}

}  // namespace

TEST(GaussianPolicy, VanishingVarianceIsDeterministic) {
  Rng rng(1);
  PolicyParams p{random_matrix(5, 2, rng), 1e-20};
  const Vector phi = random_unit(5, rng);
  const Action a = sample_action(p, phi, rng);
  EXPECT_LT((a - policy_mean(p, phi)).norm(), 1e-9);
}

TEST(GaussianPolicy, ZeroThetaSamplesIsotropicNoise) {
  Rng rng(2);
  const PolicyParams p = PolicyParams::zeros(5, 2, 0.5);
  const Vector phi = random_unit(5, rng);
  const int n = 100000;
  Vector mean = Vector::Zero(2);
  Matrix second = Matrix::Zero(2, 2);
  for (int i = 0; i < n; ++i) {
    const Action a = sample_action(p, phi, rng);
    mean += a;
    second += a * a.transpose();
  }
  mean /= n;
  second /= n;
  EXPECT_LT(mean.cwiseAbs().maxCoeff(), 3 * std::sqrt(0.5 / n));
  EXPECT_NEAR(second(0, 0), 0.5, 0.01);
  EXPECT_NEAR(second(1, 1), 0.5, 0.01);
  EXPECT_NEAR(second(0, 1), 0.0, 0.01);
}

TEST(GaussianPolicy, SampleMeanWithinClt) {
  Rng rng(3);
  const PolicyParams p{random_matrix(5, 2, rng), 0.5};
  const Vector phi = random_unit(5, rng);
  const int n = 100000;
  Vector mean = Vector::Zero(2);
  for (int i = 0; i < n; ++i) mean += sample_action(p, phi, rng);
  mean /= n;
  EXPECT_LT((mean - policy_mean(p, phi)).cwiseAbs().maxCoeff(), 3 * std::sqrt(0.5 / n));
}

TEST(GaussianPolicy, ScoreVanishesAtMean) {
  Rng rng(4);
  const PolicyParams p{random_matrix(5, 2, rng), 0.5};
  const Vector phi = random_unit(5, rng);
  EXPECT_EQ(score(p, phi, policy_mean(p, phi)).norm(), 0.0);
}

TEST(GaussianPolicy, ScoreMatchesFiniteDifferences) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    PolicyParams p{random_matrix(6, 2, rng), 0.5};
    const Vector phi = random_unit(6, rng);
    const Action a = policy_mean(p, phi) + Vector::Random(2);
    const Matrix analytic = score(p, phi, a);
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < p.theta.rows(); ++i)
      for (Eigen::Index j = 0; j < p.theta.cols(); ++j) {
        PolicyParams up = p, down = p;
        up.theta(i, j) += h;
        down.theta(i, j) -= h;
        const double fd = (log_density(up, phi, a) - log_density(down, phi, a)) / (2 * h);
        EXPECT_LE(std::abs(fd - analytic(i, j)), 1e-4 * std::max(std::abs(analytic(i, j)), 1e-3));
      }
  }
}

TEST(GaussianPolicy, ScoreNormEqualsDistanceOverVariance) {
  Rng rng(6);
  const PolicyParams p{random_matrix(5, 2, rng), 0.5};
  const Vector phi = random_unit(5, rng);
  const Vector offset = (Vector(2) << 0.6, -0.8).finished() * 1.7;
  EXPECT_NEAR(score(p, phi, policy_mean(p, phi) + offset).norm(), 1.7 / 0.5, 1e-12);
}

TEST(GaussianPolicy, LogDensityNormalization) {
  const PolicyParams p{Matrix::Zero(1, 2), 1.0 / (2 * std::numbers::pi)};
  const Vector phi = Vector::Ones(1);
  EXPECT_NEAR(log_density(p, phi, Vector::Zero(2)), 0.0, 1e-14);
}

TEST(GaussianPolicy, DensityIntegratesToOne) {
  const PolicyParams p{(Matrix(1, 1) << 0.3).finished(), 0.5};
  const Vector phi = Vector::Ones(1);
  // Composite Simpson on [-10, 10].
  const int n = 20000;
  const double lo = -10.0, hi = 10.0, h = (hi - lo) / n;
  double total = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    total += w * std::exp(log_density(p, phi, Vector::Constant(1, lo + i * h)));
  }
  EXPECT_NEAR(total * h / 3.0, 1.0, 1e-6);
}

TEST(GaussianPolicy, TranslationInvariance) {
  Rng rng(7);
  const PolicyParams p{random_matrix(4, 2, rng), 0.5};
  const Vector phi = random_unit(4, rng);
  const Action a = Vector::Random(2);
  const Vector shift = Vector::Random(2);
  // Shifting the mean through theta: add shift to theta^T phi using phi / |phi|^2.
  PolicyParams moved = p;
  moved.theta += phi * shift.transpose() / phi.squaredNorm();
  EXPECT_NEAR(log_density(p, phi, a), log_density(moved, phi, a + shift), 1e-12);
  EXPECT_TRUE(score(p, phi, a).isApprox(score(moved, phi, a + shift), 1e-12));
}

TEST(GaussianPolicy, ScoreBoundHolds) {
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const PolicyParams p{random_matrix(5, 2, rng), 0.5};
    const Vector phi = random_unit(5, rng);
    Action a = Vector::Random(2);
    const double a_max = 2.0;
    if (a.norm() > a_max) a *= a_max / a.norm();
    EXPECT_LE(score(p, phi, a).norm(), score_norm_bound(a_max, p.theta.norm(), 0.5) + 1e-12);
  }
}

TEST(GaussianPolicy, FlattenRoundTrip) {
  Rng rng(9);
  const Matrix theta = random_matrix(3, 2, rng);
  const Vector flat = flatten_theta(theta);
  EXPECT_EQ(flat[1], theta(0, 1));
  EXPECT_EQ(unflatten_theta(flat, 3, 2), theta);
}

TEST(GaussianPolicy, ValidateRejectsBadParameters) {
  PolicyParams p = PolicyParams::zeros(3, 2, 0.5);
  EXPECT_NO_THROW(p.validate());
  p.variance = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p.variance = 0.5;
  p.theta(0, 0) = NAN;
  EXPECT_THROW(p.validate(), NumericalError);
}

TEST(GaussianLinearPolicy, FamilyMatchesFreeFunctions) {
  auto phi = std::make_shared<RbfFeatureMap>(RbfFeatureMap::grid(-5, 5, 4, 1.0));
  const GaussianLinearPolicy policy(phi, 2, 0.5);
  Rng rng(10);
  const Vector params = Vector::Random(policy.param_size());
  const State s = (Vector(2) << 0.4, -1.1).finished();
  const Action a = Vector::Random(2);
  const PolicyParams p{unflatten_theta(params, phi->dim(), 2), 0.5};
  EXPECT_TRUE(policy.score(params, s, a).isApprox(flatten_theta(score(p, (*phi)(s), a))));
  EXPECT_DOUBLE_EQ(policy.log_density(params, s, a), log_density(p, (*phi)(s), a));
}

TEST(GaussianLinearPolicy, DirectionalProxy) {
  auto phi = std::make_shared<RbfFeatureMap>(RbfFeatureMap::grid(-5, 5, 4, 1.0));
  const GaussianLinearPolicy policy(phi, 2, 0.5);
  const State s = (Vector(2) << 1.0, 1.0).finished();
  const Vector params = Vector::Random(policy.param_size());
  const Action mean = policy.mean_from_features(params, (*phi)(s));
  EXPECT_NEAR(policy.gradient_proxy(params, s, 3.0 * mean), 0.0, 1e-12);
  EXPECT_NEAR(policy.gradient_proxy(params, s, -mean), 2.0 / 0.5, 1e-12);
}

TEST(SoftmaxPolicy, ProbabilitiesAndScore) {
  const SoftmaxTabularPolicy policy(3, 4);
  Rng rng(11);
  Vector params(12);
  for (Eigen::Index i = 0; i < 12; ++i) params[i] = rng.normal();
  const Matrix table = policy.table(params);
  for (int s = 0; s < 3; ++s) EXPECT_NEAR(table.row(s).sum(), 1.0, 1e-12);
  const double h = 1e-6;
  for (int s = 0; s < 3; ++s)
    for (int a = 0; a < 4; ++a) {
      const Vector sv = scalar_vector(s), av = scalar_vector(a);
      const Vector g = policy.score(params, sv, av);
      for (Eigen::Index i = 0; i < 12; ++i) {
        Vector up = params, down = params;
        up[i] += h;
        down[i] -= h;
        const double fd =
            (policy.log_density(up, sv, av) - policy.log_density(down, sv, av)) / (2 * h);
        EXPECT_NEAR(fd, g[i], 1e-8);
      }
    }
}

TEST(SoftmaxPolicy, SamplingFrequencies) {
  const SoftmaxTabularPolicy policy(1, 3);
  const Vector params = (Vector(3) << 0.0, 1.0, -1.0).finished();
  const Vector p = policy.probabilities(params, 0);
  Rng rng(12);
  Vector counts = Vector::Zero(3);
  const int n = 100000;
  for (int i = 0; i < n; ++i) counts[static_cast<int>(policy.sample(params, scalar_vector(0), rng)[0])] += 1;
  for (int a = 0; a < 3; ++a) EXPECT_NEAR(counts[a] / n, p[a], 4 * std::sqrt(p[a] / n));
}
