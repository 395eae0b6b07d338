#include "ccmix/diagnostics.hpp"
#include "ccmix/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace ccmix;

namespace {

Eigen::VectorXd normals(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = rng.normal();
  return x;
}

template <class F>
void expect_code(Errc code, F&& f) {
  try {
    f();
    FAIL() << "no throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code);
  }
}

}  // namespace

TEST(Acf, LagZeroIsOne) {
  const AcfEstimate a = acf(normals(1000, 1), 10);
  EXPECT_EQ(a.values[0], 1.0);
  EXPECT_EQ(a.lags.size(), 11u);
  EXPECT_EQ(a.series_length, 1000);
}

TEST(Acf, AlternatingSeries) {
  const int n = 10000;
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = i % 2 == 0 ? 1.0 : -1.0;
  const AcfEstimate a = acf(x, 2);
  EXPECT_NEAR(a.at(1), -1.0, 2.0 / n);
  EXPECT_NEAR(a.at(2), 1.0, 3.0 / n);
}

TEST(Acf, IidNormalsNearZero) {
  const int n = 100000;
  const AcfEstimate a = acf(normals(n, 2), 20);
  for (int k = 1; k <= 20; ++k) EXPECT_LT(std::abs(a.at(k)), 4 / std::sqrt(double(n))) << k;
}

TEST(Acf, BoundedAndReversalSymmetric) {
  // AR(1) with strong correlation
  Rng rng(3);
  Eigen::VectorXd x(5000);
  x[0] = 0;
  for (int i = 1; i < x.size(); ++i) x[i] = 0.9 * x[i - 1] + rng.normal();
  const AcfEstimate a = acf(x, 50);
  const AcfEstimate r = acf(Eigen::VectorXd(x.reverse()), 50);
  EXPECT_LE(a.values.cwiseAbs().maxCoeff(), 1.0);
  EXPECT_LE((a.values - r.values).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Acf, Errors) {
  expect_code(Errc::ConstantSeries, [] { acf(Eigen::VectorXd::Constant(100, 2.0), 5); });
  expect_code(Errc::SeriesTooShort, [] { acf(normals(5, 1), 5); });
  expect_code(Errc::SeriesTooShort, [] { acf(normals(50, 1), 0); });
}

TEST(BatchMeans, ConstantSeriesIsZero) {
  EXPECT_EQ(asymptotic_variance_batch_means(Eigen::VectorXd::Constant(1000, 3.0), 10).value, 0.0);
}

TEST(BatchMeans, IidNormals) {
  const auto est = asymptotic_variance_batch_means(normals(1000000, 4), 100);
  EXPECT_NEAR(est.value, 1.0, 0.15);
  EXPECT_EQ(est.batch_count, 100);
  EXPECT_EQ(est.method, VarianceMethod::BatchMeans);
}

TEST(BatchMeans, TwoStateChainMatchesClosedForm) {
  const double a = 0.1, b = 0.3;  // P(0->1), P(1->0)
  Rng rng(5);
  const int n = 4000000;
  Eigen::VectorXd x(n);
  int s = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    s = s == 0 ? (u < a ? 1 : 0) : (u < b ? 0 : 1);
    x[i] = s;
  }
  const double p1 = b / (a + b), p2 = a / (a + b);
  const double exact = p1 * p2 * (2 - a - b) / (a + b);
  // B * var(batch means) is ~ exact * chi2_{k-1}/(k-1): relative sd sqrt(2/(k-1))
  const int k = 1000;
  EXPECT_NEAR(asymptotic_variance_batch_means(x, k).value, exact, 4 * std::sqrt(2.0 / (k - 1)) * exact);
}

TEST(BatchMeans, Errors) {
  expect_code(Errc::TooFewBatches, [] { asymptotic_variance_batch_means(normals(100, 1), 9); });
  expect_code(Errc::SeriesTooShort, [] { asymptotic_variance_batch_means(normals(5, 1), 10); });
}

TEST(Kde, SingleKernel) {
  const Eigen::VectorXd s = Eigen::VectorXd::Zero(1);
  const Eigen::VectorXd g = Eigen::VectorXd::Zero(1);
  EXPECT_NEAR(kde(s, g, 1.0)[0], 1 / std::sqrt(2 * std::numbers::pi), 1e-16);
}

TEST(Kde, StandardNormalSample) {
  const Eigen::VectorXd s = normals(100000, 6);
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(1001, -5, 5);
  const Eigen::VectorXd d = kde(s, grid);
  const Eigen::VectorXd truth =
      (-0.5 * grid.array().square()).exp() / std::sqrt(2 * std::numbers::pi);
  EXPECT_LT((d - truth).cwiseAbs().maxCoeff(), 0.02);
  EXPECT_NEAR(trapezoid(grid, d), 1.0, 0.02);
  EXPECT_GE(d.minCoeff(), 0.0);
}

TEST(Kde, SilvermanRule) {
  const Eigen::VectorXd s = normals(1000, 7);
  const double mean = s.mean();
  const double sd = std::sqrt((s.array() - mean).square().sum() / 999.0);
  EXPECT_NEAR(silverman_bandwidth(s), 1.06 * sd * std::pow(1000.0, -0.2), 1e-15);
}

TEST(Kde, ShiftEquivariant) {
  const Eigen::VectorXd s = normals(2000, 8);
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(201, -4, 4);
  for (double c : {-3.0, 0.5, 10.0}) {
    const Eigen::VectorXd base = kde(s, grid, 0.2);
    const Eigen::VectorXd moved = kde((s.array() + c).matrix(), (grid.array() + c).matrix(), 0.2);
    EXPECT_LE((base - moved).cwiseAbs().maxCoeff(), 1e-12) << c;
  }
}

TEST(Kde, EmptySample) {
  expect_code(Errc::EmptySample, [] { kde(Eigen::VectorXd(0), Eigen::VectorXd::Zero(3)); });
}

TEST(TraceMean, ConstantFunction) {
  ChainTrace t;
  t.states.assign(10, State{0, Point::Zero(1)});
  EXPECT_EQ(trace_mean(t, [](const State&) { return 1.0; }), 1.0);
}

TEST(TraceMean, EmptyTrace) {
  expect_code(Errc::EmptyTrace, [] { trace_mean(ChainTrace{}, [](const State&) { return 1.0; }); });
}

TEST(TraceMean, ToyIndexFrequency) {
  const ModelBundle toy = toy_target();
  for (SamplerId id : {SamplerId::CC, SamplerId::MCC, SamplerId::FCC}) {
    SamplerConfig config;
    config.sampler = id;
    config.seed = 21;
    const ChainTrace t = run_chain(config, toy);
    EXPECT_NEAR(trace_mean(t, [](const State& s) { return s.m == 0 ? 1.0 : 0.0; }), 0.5, 0.01)
        << to_string(id);
  }
}

// The Gibbs index chain has integrated autocorrelation time near 50, so a
// fixed 0.01 band would be under one standard error; use 4 batch-means s.e.
TEST(TraceMean, ToyIndexFrequencyGibbs) {
  SamplerConfig config;
  config.sampler = SamplerId::Gibbs;
  config.seed = 21;
  const ChainTrace t = run_chain(config, toy_target());
  const Eigen::VectorXd ind = (t.index_series().array() == 0.0).cast<double>();
  const double se = std::sqrt(asymptotic_variance_batch_means(ind, 20).value / double(t.size()));
  EXPECT_NEAR(trace_mean(t, [](const State& s) { return s.m == 0 ? 1.0 : 0.0; }), 0.5, 4 * se);
}

TEST(Trapezoid, Linear) {
  const Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(11, 0, 1);
  EXPECT_NEAR(trapezoid(g, g), 0.5, 1e-15);
}
