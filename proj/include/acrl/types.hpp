#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace acrl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// States and actions are plain real vectors. Finite MDPs encode the
/// state (action) index as a length-1 vector.
using State = Vector;
using Action = Vector;

/// Invalid configuration or precondition on user-supplied parameters.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Feature matrix is rank deficient for the requested computation.
class FeatureRankError : public std::runtime_error {
 public:
  explicit FeatureRankError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite values or violated runtime invariants during a run.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline Vector scalar_vector(double x) { return Vector::Constant(1, x); }

}  // namespace acrl
