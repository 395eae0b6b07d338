#include "ccmix/oracle_suite.hpp"

#include "ccmix/rng.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace ccmix {

bool OracleSuiteReport::passed() const {
  for (const OracleCheck& c : checks) {
    if (!c.passed()) return false;
  }
  return true;
}

const OracleCheck& OracleSuiteReport::get(const std::string& name) const {
  for (const OracleCheck& c : checks) {
    if (c.name == name) return c;
  }
  throw Error(Errc::ConfigError, "no oracle check named " + name);
}

namespace {

double invariance_error(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& pi) {
  return (pi.transpose() * kernel - pi.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace

OracleSuiteReport verify_spec(const FiniteSpec& spec, const OracleSuiteOptions& options) {
  spec.validate();
  const Eigen::VectorXd pi = spec.stationary();
  const Kernel p3 = build_P3(spec);
  const Kernel q3 = build_Q3(spec);
  const Kernel q4 = build_Q4(spec);

  OracleSuiteReport report;
  auto add = [&report](std::string name, double value, double bound, bool at_most) {
    report.checks.push_back(OracleCheck{std::move(name), value, bound, at_most});
  };
  add("reversibility_P3", check_reversibility(p3.matrix, pi), 1e-12, true);
  add("reversibility_Q3", check_reversibility(q3.matrix, pi), 1e-12, true);
  // each block of Q3 against pi*(. | m)
  const Eigen::MatrixXd cond = spec.conditional_z();
  const int g = spec.grid_size();
  double block_dev = 0.0;
  for (int m = 0; m < spec.n; ++m) {
    const Eigen::Index at = Eigen::Index(m) * g;
    block_dev = std::max(block_dev, check_reversibility(q3.matrix.block(at, at, g, g), cond.row(m)));
  }
  add("block_reversibility_Q3", block_dev, 1e-14, true);
  add("invariance_P3", invariance_error(p3.matrix, pi), 1e-12, true);
  add("invariance_P3Q3", invariance_error(p3.matrix * q3.matrix, pi), 1e-12, true);
  add("invariance_P3Q4", invariance_error(p3.matrix * q4.matrix, pi), 1e-12, true);
  add("offdiagonal_Q3_over_Q4", check_offdiagonal_dominance(q3.matrix, q4.matrix, 0.0) ? 1.0 : 0.0,
      1.0, false);
  add("covariance_order_Q3_over_Q4", check_covariance_ordering(q3.matrix, q4.matrix, pi), -1e-10,
      false);

  // index functions: standard basis then Gaussian draws
  const int n = spec.n;
  Eigen::MatrixXd h(n, n + options.random_functions);
  h.leftCols(n).setIdentity();
  Rng rng(options.seed);
  for (int c = n; c < h.cols(); ++c) {
    for (int m = 0; m < n; ++m) h(m, c) = rng.normal();
  }
  Eigen::MatrixXd lifted(spec.state_count(), h.cols());
  for (Eigen::Index c = 0; c < h.cols(); ++c) lifted.col(c) = spec.lift_index_function(h.col(c));

  const Eigen::VectorXd mcc = exact_asymptotic_variances_alternating(p3.matrix, q3.matrix, pi, lifted);
  const Eigen::VectorXd fcc = exact_asymptotic_variances_alternating(p3.matrix, q4.matrix, pi, lifted);
  add("variance_order_MCC_FCC", (mcc - fcc).maxCoeff(), 1e-10, true);

  const Kernel gibbs = build_gibbs_index_kernel(spec);
  const Eigen::VectorXd marginal = spec.index_marginal();
  const Eigen::VectorXd sigma2 =
      exact_asymptotic_variances_alternating(gibbs.matrix, gibbs.matrix, marginal, h);
  double iid_margin = std::numeric_limits<double>::infinity();
  double min_cov = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < h.cols(); ++c) {
    const double mean = marginal.dot(h.col(c));
    const double var_iid = marginal.dot((h.col(c).array() - mean).square().matrix());
    iid_margin = std::min(iid_margin, sigma2[c] - var_iid);
    const Eigen::VectorXd cov = lag_covariances(gibbs.matrix, marginal, h.col(c), options.gibbs_max_lag);
    min_cov = std::min(min_cov, cov.minCoeff());
  }
  add("gibbs_iid_bound", iid_margin, -1e-10, false);
  add("gibbs_lag_covariance", min_cov, -1e-12, false);
  return report;
}

std::vector<FiniteSpec> randomized_specs(std::uint64_t seed, int count) {
  constexpr std::array<int, 2> kComponents{2, 3};
  constexpr std::array<int, 3> kGrids{5, 10, 25};
  std::vector<FiniteSpec> out;
  for (int i = 0; i < count; ++i) {
    const int n = kComponents[i % 2];
    const int g = kGrids[(i / 2) % 3];
    out.push_back(random_spec(n, g, stream_seed(seed, static_cast<std::uint64_t>(i))));
  }
  return out;
}

}  // namespace ccmix
