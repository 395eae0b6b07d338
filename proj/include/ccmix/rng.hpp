#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <random>

namespace ccmix {

/// Mixes a base seed and a stream number into an independent 64-bit seed.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

/// Random source for one chain. All draws of a chain go through a single
/// instance so that a seed fully determines the trajectory.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return std::generate_canonical<double, 53>(engine_); }

  double normal() { return normal_(engine_); }
  double normal(double mean, double sd) { return mean + sd * normal_(engine_); }

  double exponential() { return -std::log1p(-uniform()); }

  /// Inverse-CDF draw from a probability vector, scanning cumulative sums in
  /// index order with one uniform.
  int categorical(const Eigen::Ref<const Eigen::VectorXd>& probs);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace ccmix
