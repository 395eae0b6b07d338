#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace ccmix {

template <class Scalar, int Rows = Eigen::Dynamic>
using Vector = Eigen::Matrix<Scalar, Rows, 1>;

template <class Scalar, int Rows = Eigen::Dynamic, int Cols = Eigen::Dynamic>
using Matrix = Eigen::Matrix<Scalar, Rows, Cols>;

/// A point of the continuous space Z.
using Point = Eigen::VectorXd;

enum class Errc {
  AllZeroMass,
  PseudoPriorZero,
  InvalidCurrentState,
  MissingConditionalSampler,
  ConfigError,
  ConstantSeries,
  SeriesTooShort,
  TooFewBatches,
  EmptySample,
  EmptyTrace,
  TooLarge,
  DimensionMismatch,
  NotReversible,
  NonErgodic,
  QuadratureNotConverged,
  ParseError,
  IoError,
  UsageError,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ccmix
