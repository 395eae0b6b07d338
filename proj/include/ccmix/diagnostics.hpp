#pragma once

// Trace summaries: autocorrelation, batch-means asymptotic variance, Gaussian
// kernel density estimates and sample-path averages.

#include "ccmix/core.hpp"
#include "ccmix/samplers.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <vector>

namespace ccmix {

struct AcfEstimate {
  std::vector<int> lags;
  Eigen::VectorXd values;
  Eigen::Index series_length = 0;

  double at(int lag) const { return values[lag]; }
};

inline constexpr int kDefaultMaxLag = 50;

/// Biased sample autocorrelation: c_k = (1/N) sum_t (x_t - mean)(x_{t+k} - mean),
/// value_k = c_k / c_0.
template <class Derived>
AcfEstimate acf(const Eigen::MatrixBase<Derived>& series, int max_lag = kDefaultMaxLag) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = series.size();
  if (max_lag < 1 || n <= max_lag) {
    throw Error(Errc::SeriesTooShort, "need series length > max_lag >= 1");
  }
  const Vector<Scalar> centered = series.derived().reshaped().array() - series.mean();
  const Scalar c0 = centered.squaredNorm();
  if (!(c0 > Scalar(0))) throw Error(Errc::ConstantSeries, "autocorrelation of a constant series");

  AcfEstimate out;
  out.series_length = n;
  out.lags.resize(max_lag + 1);
  out.values.resize(max_lag + 1);
  out.lags[0] = 0;
  out.values[0] = 1.0;
  for (int k = 1; k <= max_lag; ++k) {
    const Scalar ck = centered.head(n - k).dot(centered.tail(n - k));
    out.lags[k] = k;
    out.values[k] = static_cast<double>(ck / c0);
  }
  return out;
}

enum class VarianceMethod { BatchMeans };

struct AsymptoticVarianceEstimate {
  double value = 0.0;
  VarianceMethod method = VarianceMethod::BatchMeans;
  int batch_count = 0;
};

/// B * (sample variance of the batch means), B the batch length. A trailing
/// remainder shorter than one batch is dropped.
template <class Derived>
AsymptoticVarianceEstimate asymptotic_variance_batch_means(const Eigen::MatrixBase<Derived>& series,
                                                           int batch_count) {
  if (batch_count < 10) throw Error(Errc::TooFewBatches, "batch means needs at least 10 batches");
  const Eigen::Index batch_length = series.size() / batch_count;
  if (batch_length < 1) throw Error(Errc::SeriesTooShort, "fewer samples than batches");

  const auto flat = series.derived().reshaped();
  Eigen::VectorXd means(batch_count);
  for (int b = 0; b < batch_count; ++b) {
    means[b] = static_cast<double>(flat.segment(b * batch_length, batch_length).mean());
  }
  const double grand = means.mean();
  const double spread = (means.array() - grand).square().sum() / (batch_count - 1);
  return {std::max(0.0, static_cast<double>(batch_length) * spread), VarianceMethod::BatchMeans,
          batch_count};
}

/// 1.06 * sd * N^(-1/5).
double silverman_bandwidth(const Eigen::Ref<const Eigen::VectorXd>& samples);

/// Gaussian kernel density estimate on `grid`. Without an explicit bandwidth
/// the Silverman rule is used.
Eigen::VectorXd kde(const Eigen::Ref<const Eigen::VectorXd>& samples,
                    const Eigen::Ref<const Eigen::VectorXd>& grid,
                    std::optional<double> bandwidth = std::nullopt);

double trace_mean(const ChainTrace& trace, const std::function<double(const State&)>& f);

/// Composite trapezoid rule over a sorted grid.
double trapezoid(const Eigen::Ref<const Eigen::VectorXd>& grid,
                 const Eigen::Ref<const Eigen::VectorXd>& values);

}  // namespace ccmix
