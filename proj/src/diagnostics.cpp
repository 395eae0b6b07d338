#include "ccmix/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ccmix {

namespace {

// Kernel contributions beyond this many bandwidths are below 1e-21 and dropped.
constexpr double kKernelCutoff = 10.0;

}  // namespace

double silverman_bandwidth(const Eigen::Ref<const Eigen::VectorXd>& samples) {
  const Eigen::Index n = samples.size();
  if (n == 0) throw Error(Errc::EmptySample, "no samples");
  if (n < 2) throw Error(Errc::ConfigError, "Silverman bandwidth needs at least two samples");
  const double mean = samples.mean();
  const double sd = std::sqrt((samples.array() - mean).square().sum() / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw Error(Errc::ConstantSeries, "Silverman bandwidth of a constant sample");
  return 1.06 * sd * std::pow(static_cast<double>(n), -0.2);
}

Eigen::VectorXd kde(const Eigen::Ref<const Eigen::VectorXd>& samples,
                    const Eigen::Ref<const Eigen::VectorXd>& grid, std::optional<double> bandwidth) {
  if (samples.size() == 0) throw Error(Errc::EmptySample, "no samples");
  const double h = bandwidth ? *bandwidth : silverman_bandwidth(samples);
  if (!(h > 0.0)) throw Error(Errc::ConfigError, "bandwidth must be positive");

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double norm = 1.0 / (static_cast<double>(sorted.size()) * h * std::sqrt(2.0 * std::numbers::pi));

  Eigen::VectorXd density(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    auto first = std::lower_bound(sorted.begin(), sorted.end(), x - kKernelCutoff * h);
    auto last = std::upper_bound(first, sorted.end(), x + kKernelCutoff * h);
    double sum = 0.0;
    for (auto it = first; it != last; ++it) {
      const double d = (x - *it) / h;
      sum += std::exp(-0.5 * d * d);
    }
    density[i] = sum * norm;
  }
  return density;
}

double trace_mean(const ChainTrace& trace, const std::function<double(const State&)>& f) {
  if (trace.states.empty()) throw Error(Errc::EmptyTrace, "mean of an empty trace");
  double sum = 0.0;
  for (const State& s : trace.states) sum += f(s);
  return sum / static_cast<double>(trace.states.size());
}

double trapezoid(const Eigen::Ref<const Eigen::VectorXd>& grid,
                 const Eigen::Ref<const Eigen::VectorXd>& values) {
  if (grid.size() != values.size()) throw Error(Errc::DimensionMismatch, "grid/value size mismatch");
  double sum = 0.0;
  for (Eigen::Index i = 1; i < grid.size(); ++i) {
    sum += 0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]);
  }
  return sum;
}

}  // namespace ccmix
