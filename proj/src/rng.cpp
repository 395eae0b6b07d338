#include "ccmix/core.hpp"
#include "ccmix/rng.hpp"

namespace ccmix {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::AllZeroMass: return "AllZeroMass";
    case Errc::PseudoPriorZero: return "PseudoPriorZero";
    case Errc::InvalidCurrentState: return "InvalidCurrentState";
    case Errc::MissingConditionalSampler: return "MissingConditionalSampler";
    case Errc::ConfigError: return "ConfigError";
    case Errc::ConstantSeries: return "ConstantSeries";
    case Errc::SeriesTooShort: return "SeriesTooShort";
    case Errc::TooFewBatches: return "TooFewBatches";
    case Errc::EmptySample: return "EmptySample";
    case Errc::EmptyTrace: return "EmptyTrace";
    case Errc::TooLarge: return "TooLarge";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NotReversible: return "NotReversible";
    case Errc::NonErgodic: return "NonErgodic";
    case Errc::QuadratureNotConverged: return "QuadratureNotConverged";
    case Errc::ParseError: return "ParseError";
    case Errc::IoError: return "IoError";
    case Errc::UsageError: return "UsageError";
  }
  return "Unknown";
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer applied to a combined key
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

int Rng::categorical(const Eigen::Ref<const Eigen::VectorXd>& probs) {
  const double u = uniform();
  double cumulative = 0.0;
  int last_positive = -1;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = static_cast<int>(i);
    cumulative += probs[i];
    if (u < cumulative) return last_positive;
  }
  // u landed in the rounding gap above the final cumulative sum
  return last_positive;
}

}  // namespace ccmix
