#include "acrl/features.hpp"

#include <Eigen/QR>

#include <cmath>
#include <string>

namespace acrl {

double rbf_kernel(const Vector& s, const Vector& center, double bandwidth) {
  if (!(bandwidth > 0.0)) throw ConfigError("rbf bandwidth must be positive");
  return std::exp(-(s - center).squaredNorm() / (2.0 * bandwidth * bandwidth));
}

std::vector<Vector> grid_centers(double lower, double upper, int per_axis) {
  if (per_axis < 1) throw ConfigError("grid needs at least one point per axis");
  if (!(lower < upper)) throw ConfigError("grid requires lower < upper");
  std::vector<double> ticks(per_axis);
  if (per_axis == 1) {
    ticks[0] = 0.5 * (lower + upper);
  } else {
    const double spacing = (upper - lower) / (per_axis - 1);
    for (int i = 0; i < per_axis; ++i) ticks[i] = lower + spacing * i;
    ticks.back() = upper;
  }
  std::vector<Vector> centers;
  centers.reserve(static_cast<std::size_t>(per_axis) * per_axis);
  for (double x : ticks)
    for (double y : ticks) centers.push_back((Vector(2) << x, y).finished());
  return centers;
}

RbfFeatureMap::RbfFeatureMap(std::vector<Vector> centers, double bandwidth, bool normalize)
    : bandwidth_(bandwidth), normalize_(normalize) {
  if (centers.empty()) throw ConfigError("rbf feature map needs at least one center");
  if (!(bandwidth > 0.0)) throw ConfigError("rbf bandwidth must be positive");
  const Eigen::Index n = centers.front().size();
  centers_.resize(n, static_cast<Eigen::Index>(centers.size()));
  for (std::size_t j = 0; j < centers.size(); ++j) {
    if (centers[j].size() != n) throw ConfigError("rbf centers must share one dimension");
    centers_.col(static_cast<Eigen::Index>(j)) = centers[j];
  }
}

RbfFeatureMap RbfFeatureMap::grid(double lower, double upper, int per_axis, double bandwidth,
                                  bool normalize) {
  return RbfFeatureMap(grid_centers(lower, upper, per_axis), bandwidth, normalize);
}

Vector RbfFeatureMap::operator()(const State& s) const {
  const double scale = -1.0 / (2.0 * bandwidth_ * bandwidth_);
  Vector phi = ((centers_.colwise() - s).colwise().squaredNorm().transpose() * scale)
                   .array()
                   .exp()
                   .matrix();
  if (normalize_) {
    const double norm = phi.norm();
    // Every kernel value underflowed: fall back to the nearest center.
    if (norm == 0.0) {
      Eigen::Index nearest = 0;
      (centers_.colwise() - s).colwise().squaredNorm().minCoeff(&nearest);
      phi.setZero();
      phi[nearest] = 1.0;
      return phi;
    }
    phi /= norm;
  }
  return phi;
}

TabularFeatureMap::TabularFeatureMap(int num_states, int num_actions, Matrix rows)
    : num_states_(num_states), num_actions_(num_actions), rows_(std::move(rows)) {
  if (num_states < 1 || num_actions < 1) throw ConfigError("tabular features need S, A >= 1");
  if (rows_.rows() != static_cast<Eigen::Index>(num_states) * num_actions)
    throw ConfigError("tabular feature matrix must have S * A rows");
  Eigen::ColPivHouseholderQR<Matrix> qr(rows_);
  qr.setThreshold(1e-10);
  if (qr.rank() < rows_.cols())
    throw FeatureRankError("tabular feature matrix has rank " + std::to_string(qr.rank()) +
                           " < " + std::to_string(rows_.cols()) + " columns");
}

TabularFeatureMap TabularFeatureMap::one_hot(int num_states, int num_actions) {
  const Eigen::Index n = static_cast<Eigen::Index>(num_states) * num_actions;
  return TabularFeatureMap(num_states, num_actions, Matrix::Identity(n, n));
}

Vector TabularFeatureMap::operator()(const State& s, const Action& a) const {
  const int si = static_cast<int>(s[0]);
  const int ai = static_cast<int>(a[0]);
  return rows_.row(pair_index(si, ai)).transpose();
}

}  // namespace acrl
