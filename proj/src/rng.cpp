#include "acrl/rng.hpp"

namespace acrl {

Rng::Rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0x9e3779b9u};
  engine_.seed(seq);
}

Rng Rng::split() {
  const std::uint64_t a = engine_();
  const std::uint64_t b = engine_();
  Rng child(a ^ (b << 1));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  child.engine_.seed(seq);
  return child;
}

double Rng::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

double Rng::normal() { return normal_(engine_); }

}  // namespace acrl
