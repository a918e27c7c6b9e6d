#pragma once

#include <cstdint>
#include <random>

namespace acrl {

/// Seeded random source owned by a single run. Children obtained through
/// split() are independent streams, so parallel work never shares state.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  result_type operator()() { return engine_(); }
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }

  /// Derive a child generator; advances this generator by two draws.
  Rng split();

  double uniform();
  double normal();

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace acrl
