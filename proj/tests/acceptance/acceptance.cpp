// Acceptance gate: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include "ccmix/experiments.hpp"
#include "ccmix/oracle.hpp"
#include "ccmix/oracle_suite.hpp"
#include "support/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace ccmix;
using namespace ccmix::testing;

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kSpecSeed = 1;
// same base seed as the CLI default, so `ccmix toy` / `ccmix posterior` reproduce these runs
constexpr std::uint64_t kToySeed = 42;
constexpr std::uint64_t kPosteriorSeed = 42;
constexpr int kSeeds = 10;
constexpr long kIters = 101000;
constexpr long kBurnIn = 1000;
constexpr double kLevel = 0.001;

struct Result {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double se_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  const double n = static_cast<double>(v.size());
  return std::sqrt(ss / (n - 1) / n);
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Point pt(double x) { return Point::Constant(1, x); }

// --- criteria 1-5: finite-state oracle -----------------------------------

struct OracleRun {
  std::vector<FiniteSpec> specs;
  std::vector<OracleSuiteReport> reports;
};

const OracleRun& oracle_run() {
  static const OracleRun run = [] {
    OracleRun r;
    r.specs = randomized_specs(kSpecSeed, 20);
    for (const FiniteSpec& s : r.specs) r.reports.push_back(verify_spec(s));
    return r;
  }();
  return run;
}

double worst(const std::string& name, bool at_most) {
  double w = at_most ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  for (const OracleSuiteReport& r : oracle_run().reports) {
    const double v = r.get(name).value;
    w = at_most ? std::max(w, v) : std::min(w, v);
  }
  return w;
}

Result criterion1() {
  Result r;
  const auto t0 = Clock::now();
  double p3_dev = 0, q3_block = 0;
  for (const FiniteSpec& s : randomized_specs(kSpecSeed, 20)) {
    const Eigen::VectorXd pi = s.stationary();
    p3_dev = std::max(p3_dev, check_reversibility(build_P3(s).matrix, pi));
    const Kernel q3 = build_Q3(s);
    const Eigen::MatrixXd cond = s.conditional_z();
    const int g = s.grid_size();
    for (int m = 0; m < s.n; ++m) {
      q3_block = std::max(q3_block, check_reversibility(q3.matrix.block(m * g, m * g, g, g), cond.row(m)));
    }
  }
  const double elapsed = seconds_since(t0);
  r.detail << "max P3 deviation " << p3_dev << ", max Q3 block deviation " << q3_block << ", "
           << elapsed << " s";
  r.require(p3_dev <= 1e-12, "P3 <= 1e-12");
  r.require(q3_block <= 1e-14, "Q3 blocks <= 1e-14");
  r.require(elapsed < 30.0, "runtime < 30 s");
  return r;
}

Result criterion2() {
  Result r;
  const double a = worst("invariance_P3", true);
  const double b = worst("invariance_P3Q3", true);
  const double c = worst("invariance_P3Q4", true);
  r.detail << "max |pi^T K - pi^T|: P3 " << a << ", P3Q3 " << b << ", P3Q4 " << c;
  r.require(std::max({a, b, c}) <= 1e-12, "<= 1e-12");
  return r;
}

Result criterion3() {
  Result r;
  const double offdiag = worst("offdiagonal_Q3_over_Q4", false);
  const double lambda = worst("covariance_order_Q3_over_Q4", false);
  r.detail << "off-diagonal dominance on all specs: " << (offdiag == 1.0 ? "yes" : "no")
           << ", min lambda_min(D(Q4 - Q3)) " << lambda;
  r.require(offdiag == 1.0, "Q3 >= Q4 off-diagonal");
  r.require(lambda >= -1e-10, "lambda_min >= -1e-10");
  return r;
}

Result criterion4() {
  Result r;
  const double gap = worst("variance_order_MCC_FCC", true);
  r.detail << "max sigma2_MCC - sigma2_FCC over basis + 100 random h, 20 specs: " << gap;
  r.require(gap <= 1e-10, "<= 1e-10");
  return r;
}

Result criterion5() {
  Result r;
  const double margin = worst("gibbs_iid_bound", false);
  const double cov = worst("gibbs_lag_covariance", false);
  r.detail << "min sigma2_gibbs - var_iid " << margin << ", min lag covariance (k <= 200) " << cov;
  r.require(margin >= -1e-10, "sigma2_gibbs >= var_iid - 1e-10");
  r.require(cov >= -1e-12, "lag covariances >= -1e-12");
  return r;
}

// --- criterion 6: Gaussian strata ------------------------------------------

Result criterion6() {
  Result r;
  const auto t0 = Clock::now();
  const SamplerId order[4] = {SamplerId::CC, SamplerId::MCC, SamplerId::FCC, SamplerId::Gibbs};
  std::vector<double> acf1[4];
  const auto reports = replicate(kToySeed, kSeeds, [](std::uint64_t s) {
    return run_toy_experiment(s, kIters, kBurnIn);
  });
  for (const ExperimentReport& rep : reports) {
    for (int i = 0; i < 4; ++i) acf1[i].push_back(rep.get(order[i]).acf_index.at(1));
  }
  r.detail << "lag-1 M-ACF";
  for (int i = 0; i < 4; ++i) r.detail << ' ' << to_string(order[i]) << ' ' << mean_of(acf1[i]) << "+-" << se_of(acf1[i]);
  for (int i = 0; i + 1 < 4; ++i) {
    const double pooled = std::hypot(se_of(acf1[i]), se_of(acf1[i + 1]));
    const double gap = mean_of(acf1[i + 1]) - mean_of(acf1[i]);
    r.require(gap >= -2 * pooled, std::string(to_string(order[i])) + " <= " + std::string(to_string(order[i + 1])));
  }
  const double exact =
      exact_gibbs_index_autocorrelation(toy_target(), Eigen::VectorXd::LinSpaced(801, -4.0, 4.0));
  const double diff = std::abs(mean_of(acf1[3]) - exact);
  r.detail << "; exact Gibbs " << exact << " (|diff| " << diff << ", 3 s.e. " << 3 * se_of(acf1[3]) << ")";
  r.require(diff <= 3 * se_of(acf1[3]), "Gibbs matches oracle within 3 s.e.");
  // lag 1 only sees the shared index move, so CC/MCC/FCC tie exactly; reported for context
  const FiniteSpec coarse = discretize(toy_target(), Eigen::VectorXd::LinSpaced(201, -4.0, 4.0));
  const Eigen::VectorXd pi = coarse.stationary();
  Eigen::VectorXd h(pi.size());
  for (Eigen::Index i = 0; i < h.size(); ++i) h[i] = static_cast<double>(i / coarse.grid_size());
  const Eigen::MatrixXd p3 = build_P3(coarse).matrix;
  auto lag1 = [&](const Eigen::MatrixXd& k) {
    const Eigen::VectorXd c = lag_covariances(k, pi, h, 1);
    return c[1] / c[0];
  };
  r.detail << "; exact lag-1 MCC " << lag1(p3 * build_Q3(coarse).matrix) << ", FCC "
           << lag1(p3 * build_Q4(coarse).matrix);
  const double elapsed = seconds_since(t0);
  r.detail << "; " << elapsed << " s";
  r.require(elapsed < 300.0, "runtime < 5 min");
  return r;
}

// --- criterion 7: partially observed mixture -------------------------------

Result criterion7() {
  Result r;
  const auto reports = replicate(kPosteriorSeed, kSeeds, [](std::uint64_t s) {
    return run_posterior_experiment(s, kIters, kBurnIn);
  });
  std::vector<double> fcc_mean, mcc_mean, mwg_acf, fcc_acf, sup;
  for (const ExperimentReport& rep : reports) {
    fcc_mean.push_back(rep.get(SamplerId::FCC).mean_z);
    mcc_mean.push_back(rep.get(SamplerId::MCC).mean_z);
    mwg_acf.push_back(rep.get(SamplerId::MwG).acf_index.at(1));
    fcc_acf.push_back(rep.get(SamplerId::FCC).acf_index.at(1));
    sup.push_back(rep.density->sup_distance());
  }
  auto in_band = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::abs(x - 0.315) <= 0.02; });
  };
  r.detail << "mu_z truth " << *reports.front().true_mean_z << "; FCC means in ["
           << *std::min_element(fcc_mean.begin(), fcc_mean.end()) << ", "
           << *std::max_element(fcc_mean.begin(), fcc_mean.end()) << "], MCC in ["
           << *std::min_element(mcc_mean.begin(), mcc_mean.end()) << ", "
           << *std::max_element(mcc_mean.begin(), mcc_mean.end()) << "]";
  r.require(in_band(fcc_mean), "FCC mean within 0.315 +- 0.02 on every seed");
  r.require(in_band(mcc_mean), "MCC mean within 0.315 +- 0.02 on every seed");

  const double acf_gap = mean_of(mwg_acf) - mean_of(fcc_acf);
  r.detail << "; lag-1 M-ACF MwG " << mean_of(mwg_acf) << " vs FCC " << mean_of(fcc_acf);
  r.require(acf_gap >= 0.1, "MwG lag-1 exceeds FCC by >= 0.1");

  const ModelBundle model = posterior_target();
  const double t_fcc = median_wall_clock(model, SamplerId::FCC, kIters, kBurnIn, kPosteriorSeed, 5);
  const double t_mcc = median_wall_clock(model, SamplerId::MCC, kIters, kBurnIn, kPosteriorSeed, 5);
  r.detail << "; median wall-clock FCC " << t_fcc << " s, MCC " << t_mcc << " s";
  r.require(t_fcc < t_mcc, "FCC faster than MCC");

  const double sup_median = median_of(sup);
  r.detail << "; KDE sup-distance median " << sup_median << " (range "
           << *std::min_element(sup.begin(), sup.end()) << ".." << *std::max_element(sup.begin(), sup.end())
           << ")";
  r.require(sup_median < 0.05, "KDE sup-distance < 0.05");
  return r;
}

// --- criterion 8: collapse identities --------------------------------------

std::vector<State> toy_draws(int count, Rng& rng) {
  std::vector<State> out;
  for (int i = 0; i < count; ++i) {
    const int m = rng.uniform() < 0.5 ? 0 : 1;
    out.push_back(State{m, pt(rng.normal(m == 0 ? -1.0 : 1.0, std::sqrt(0.2)))});
  }
  return out;
}

struct TwoSample {
  double index_p = 1.0;
  double ks = 0.0;
  double ks_crit = 0.0;

  bool indistinguishable() const { return index_p > kLevel && ks < ks_crit; }
};

TwoSample compare(const std::vector<State>& inputs, const std::function<State(const State&, Rng&)>& a,
                  const std::function<State(const State&, Rng&)>& b, std::uint64_t seed) {
  Rng ra(stream_seed(seed, 1)), rb(stream_seed(seed, 2));
  std::vector<double> za, zb, ia(2, 0.0), ib(2, 0.0);
  for (const State& s : inputs) {
    const State x = a(s, ra);
    const State y = b(s, rb);
    za.push_back(x.z[0]);
    zb.push_back(y.z[0]);
    ia[x.m] += 1;
    ib[y.m] += 1;
  }
  TwoSample t;
  t.index_p = chi_square_two_sample(ia, ib);
  t.ks = ks_statistic(za, zb);
  t.ks_crit = ks_critical(za.size(), zb.size(), kLevel);
  return t;
}

Result criterion8() {
  Result r;
  const ModelBundle toy = toy_target();
  const ProposalFamily delta = delta_proposal(2);
  const ProposalFamily exact = gaussian_independence_proposal({-1.0, 1.0}, {0.2, 0.2});
  Rng input_rng(8);
  const auto inputs = toy_draws(100000, input_rng);

  const TwoSample d = compare(
      inputs, [&](const State& s, Rng& g) { return mcc_step(toy.target, *toy.pseudo, delta, s, g).state; },
      [&](const State& s, Rng& g) { return fcc_step(toy.target, *toy.pseudo, s, g); }, 81);
  const TwoSample e = compare(
      inputs, [&](const State& s, Rng& g) { return mcc_step(toy.target, *toy.pseudo, exact, s, g).state; },
      [&](const State& s, Rng& g) { return cc_step(toy.target, *toy.pseudo, s, g); }, 82);
  r.detail << "MCC(delta) vs FCC: index p " << d.index_p << ", KS " << d.ks << " < " << d.ks_crit
           << "; MCC(exact) vs CC: index p " << e.index_p << ", KS " << e.ks << " < " << e.ks_crit;
  r.require(d.indistinguishable(), "MCC(delta) ~ FCC");
  r.require(e.indistinguishable(), "MCC(exact) ~ CC");
  return r;
}

// --- criterion 9: optimal pseudo-priors ------------------------------------

Result criterion9() {
  Result r;
  const ModelBundle toy = toy_target_optimal();
  Rng rng(9);
  double dev = 0;
  for (int i = 0; i < 1000; ++i) {
    // u_j drawn from the pseudo-priors themselves
    const auto w = cc_index_weights(toy.target, *toy.pseudo, {toy.pseudo->sample(0, rng), toy.pseudo->sample(1, rng)});
    dev = std::max(dev, (w.array() - 0.5).abs().maxCoeff());
  }
  const double tol = 4 * std::numeric_limits<double>::epsilon();
  SamplerConfig config;
  config.sampler = SamplerId::CC;
  config.n_iterations = kIters;
  config.burn_in = kBurnIn;
  config.seed = 99;
  const ChainTrace trace = run_chain(config, toy);
  const Eigen::VectorXd idx = trace.index_series();
  const double z = runs_test_z(idx);
  const double crit = normal_critical(kLevel);
  r.detail << "max |w - 0.5| " << dev << " (<= " << tol << "); runs test |Z| " << std::abs(z) << " < " << crit;
  r.require(dev <= tol, "weights (0.5, 0.5) to machine precision");
  r.require(std::abs(z) < crit, "runs test at 0.999");
  return r;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
      {"reversibility of P3 and Q3", criterion1},
      {"invariance of P3, P3Q3, P3Q4", criterion2},
      {"off-diagonal and covariance ordering Q3 over Q4", criterion3},
      {"asymptotic variance MCC <= FCC", criterion4},
      {"Gibbs index chain no better than i.i.d.", criterion5},
      {"Gaussian strata ACF ordering", criterion6},
      {"partially observed mixture", criterion7},
      {"collapse identities", criterion8},
      {"optimal pseudo-priors give i.i.d. indices", criterion9},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result res;
    try {
      res = criteria[i].second();
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail << "threw: " << e.what();
    }
    failed += !res.pass;
    std::printf("[%s] criterion %zu: %s -- %s\n", res.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                res.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
