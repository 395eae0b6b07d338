#include "ccmix/experiments.hpp"

#include "ccmix/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

namespace ccmix {

namespace {

constexpr double kDomainLo = -3.0;
constexpr double kDomainHi = 3.0;
constexpr double kMaxGridStep = 0.005;

PseudoPriorSet gaussian_pseudo(std::array<double, 2> mean, std::array<double, 2> var) {
  return PseudoPriorSet(
      2, [mean, var](int j, const Point& u) { return log_normal_pdf(u[0], mean[j], var[j]); },
      [mean, var](int j, Rng& rng) { return Point::Constant(1, rng.normal(mean[j], std::sqrt(var[j]))); });
}

MixtureTarget toy_mixture(const ToyParams& p) {
  return MixtureTarget(
      2, 1,
      [p](int m, const Point& z) { return std::log(0.5) + log_normal_pdf(z[0], p.mu[m], p.sigma2); },
      DrawFn([p](int m, Rng& rng) {
        return Point::Constant(1, rng.normal(p.mu[m], std::sqrt(p.sigma2)));
      }));
}

// Composite Simpson rule for sum_m exp(log pi*(m, z)) and its first moment.
struct SimpsonSums {
  double mass = 0.0;
  double moment = 0.0;
};

SimpsonSums simpson(const MixtureTarget& target, long intervals) {
  const double h = (kDomainHi - kDomainLo) / static_cast<double>(intervals);
  SimpsonSums out;
  for (long i = 0; i <= intervals; ++i) {
    const double z = kDomainLo + h * static_cast<double>(i);
    const double weight = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    double value = 0.0;
    for (int m = 0; m < target.n(); ++m) value += std::exp(target.log_density(m, Point::Constant(1, z)));
    out.mass += weight * value;
    out.moment += weight * value * z;
  }
  out.mass *= h / 3.0;
  out.moment *= h / 3.0;
  return out;
}

}  // namespace

ModelBundle toy_target(const ToyParams& params) {
  PseudoPriorSet pseudo = gaussian_pseudo(params.pseudo_mu, params.pseudo_sigma2);
  ProposalFamily proposal = independence_proposal(pseudo);
  return ModelBundle{toy_mixture(params), std::move(pseudo), std::move(proposal)};
}

ModelBundle toy_target_optimal(const ToyParams& params) {
  const std::array<double, 2> var{params.sigma2, params.sigma2};
  PseudoPriorSet pseudo = gaussian_pseudo(params.mu, var);
  ProposalFamily proposal = independence_proposal(pseudo);
  return ModelBundle{toy_mixture(params), std::move(pseudo), std::move(proposal)};
}

ProposalFamily gaussian_independence_proposal(std::array<double, 2> mean, std::array<double, 2> var) {
  return independence_proposal(gaussian_pseudo(mean, var));
}

ObservationModel observation_model(double x_obs, const PosteriorParams& p) {
  MixtureTarget prior(
      2, 1,
      [p](int m, const Point& z) { return std::log(p.alpha[m]) + log_normal_pdf(z[0], p.mu[m], p.sigma2); },
      DrawFn([p](int m, Rng& rng) {
        return Point::Constant(1, rng.normal(p.mu[m], std::sqrt(p.sigma2)));
      }));
  const double noise_var = p.noise_var;
  return ObservationModel{
      [noise_var](int, double z, double x) { return log_normal_pdf(x, z * z, noise_var); }, x_obs,
      std::move(prior)};
}

ModelBundle posterior_target(double x_obs, const PosteriorParams& params) {
  const ObservationModel obs = observation_model(x_obs, params);
  MixtureTarget target(2, 1, [obs](int m, const Point& z) {
    return obs.prior.log_density(m, z) + obs.log_g(m, z[0], obs.x_obs);
  });
  const std::array<double, 2> var{params.sigma2, params.sigma2};
  PseudoPriorSet pseudo = gaussian_pseudo(params.mu, var);
  ProposalFamily proposal = independence_proposal(pseudo);
  return ModelBundle{std::move(target), std::move(pseudo), std::move(proposal)};
}

Eigen::VectorXd default_density_grid() {
  const auto points = static_cast<Eigen::Index>(std::lround((kDomainHi - kDomainLo) / kMaxGridStep)) + 1;
  return Eigen::VectorXd::LinSpaced(points, kDomainLo, kDomainHi);
}

TruePosterior true_posterior(double x_obs, const Eigen::Ref<const Eigen::VectorXd>& grid,
                             double quad_tol, const PosteriorParams& params) {
  if (grid.size() < 2 || grid[0] > kDomainLo || grid[grid.size() - 1] < kDomainHi) {
    throw Error(Errc::ConfigError, "density grid must span [-3, 3]");
  }
  for (Eigen::Index i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1]) || grid[i] - grid[i - 1] > kMaxGridStep + 1e-12) {
      throw Error(Errc::ConfigError, "density grid must be increasing with step <= 0.005");
    }
  }
  const MixtureTarget target = posterior_target(x_obs, params).target;

  TruePosterior out;
  long intervals = 600;
  SimpsonSums coarse = simpson(target, intervals);
  constexpr long kMaxIntervals = 1L << 22;
  while (true) {
    const SimpsonSums fine = simpson(target, 2 * intervals);
    intervals *= 2;
    const double mass_err = std::abs(fine.mass - coarse.mass) / 15.0;
    const double moment_err = std::abs(fine.moment - coarse.moment) / 15.0;
    coarse = fine;
    if (mass_err <= quad_tol * fine.mass && moment_err <= quad_tol * fine.mass) break;
    if (intervals >= kMaxIntervals) {
      throw Error(Errc::QuadratureNotConverged, "Simpson refinement did not reach the tolerance");
    }
  }

  // Outside [-3, 3], z^2 >= 9 and the likelihood is at most its value at z^2 = 9
  // (or its peak if x lies beyond 9); the prior has total mass sum(alpha).
  const double likelihood_bound =
      x_obs < 9.0 ? std::exp(log_normal_pdf(x_obs, 9.0, params.noise_var))
                  : 1.0 / std::sqrt(2.0 * std::numbers::pi * params.noise_var);
  const double tail_bound = likelihood_bound * (params.alpha[0] + params.alpha[1]);
  if (!(tail_bound < 1e-12 * coarse.mass)) {
    throw Error(Errc::QuadratureNotConverged, "posterior mass outside [-3, 3] is not negligible");
  }

  out.intervals = intervals;
  out.normalizing_constant = coarse.mass;
  out.mu_z = coarse.moment / coarse.mass;
  out.density.resize(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    double value = 0.0;
    for (int m = 0; m < target.n(); ++m) value += std::exp(target.log_density(m, Point::Constant(1, grid[i])));
    out.density[i] = value / coarse.mass;
  }
  return out;
}

const SamplerSummary& ExperimentReport::get(SamplerId id) const {
  for (const SamplerSummary& s : samplers) {
    if (s.sampler == id) return s;
  }
  throw Error(Errc::ConfigError, std::string("sampler ") + std::string(to_string(id)) + " not in report");
}

SamplerSummary summarize(const ChainTrace& trace, int max_lag) {
  SamplerSummary out;
  out.sampler = trace.sampler;
  out.acf_index = acf(trace.index_series(), max_lag);
  out.acf_z = acf(trace.component_series(0), max_lag);
  out.mean_z = trace_mean(trace, [](const State& s) { return s.z[0]; });
  out.acceptance = trace.acceptance_rate;
  out.wall_clock_s = trace.wall_clock_seconds;
  return out;
}

std::uint64_t sampler_seed(std::uint64_t seed, SamplerId id) {
  return stream_seed(seed, static_cast<std::uint64_t>(id));
}

namespace {

ExperimentReport run_samplers(std::string name, std::uint64_t seed, long n_iter, long burn_in,
                              const ModelBundle& model, std::initializer_list<SamplerId> ids) {
  ExperimentReport report;
  report.name = std::move(name);
  report.seed = seed;
  for (SamplerId id : ids) {
    SamplerConfig config;
    config.sampler = id;
    config.n_iterations = n_iter;
    config.burn_in = burn_in;
    config.seed = sampler_seed(seed, id);
    report.samplers.push_back(summarize(run_chain(config, model)));
  }
  return report;
}

}  // namespace

ExperimentReport run_toy_experiment(std::uint64_t seed, long n_iter, long burn_in,
                                    const ToyParams& params) {
  ExperimentReport report =
      run_samplers("toy", seed, n_iter, burn_in, toy_target(params),
                   {SamplerId::Gibbs, SamplerId::CC, SamplerId::MCC, SamplerId::FCC});
  report.true_mean_z = 0.5 * (params.mu[0] + params.mu[1]);
  return report;
}

ExperimentReport run_posterior_experiment(std::uint64_t seed, long n_iter, long burn_in,
                                          double x_obs, const PosteriorParams& params) {
  const ModelBundle model = posterior_target(x_obs, params);
  ExperimentReport report;
  report.name = "posterior";
  report.seed = seed;
  ChainTrace fcc_trace;
  for (SamplerId id : {SamplerId::MwG, SamplerId::MCC, SamplerId::FCC}) {
    SamplerConfig config;
    config.sampler = id;
    config.n_iterations = n_iter;
    config.burn_in = burn_in;
    config.seed = sampler_seed(seed, id);
    ChainTrace trace = run_chain(config, model);
    report.samplers.push_back(summarize(trace));
    if (id == SamplerId::FCC) fcc_trace = std::move(trace);
  }

  const Eigen::VectorXd grid = default_density_grid();
  const TruePosterior truth = true_posterior(x_obs, grid, 1e-10, params);
  report.true_mean_z = truth.mu_z;
  report.density = DensityComparison{grid, kde(fcc_trace.component_series(0), grid), truth.density};
  return report;
}

std::vector<ExperimentReport> replicate(std::uint64_t seed, int count,
                                        const std::function<ExperimentReport(std::uint64_t)>& experiment,
                                        bool parallel) {
  std::vector<ExperimentReport> out;
  out.reserve(count);
  if (!parallel) {
    for (int r = 0; r < count; ++r) out.push_back(experiment(seed + r));
    return out;
  }
  std::vector<std::future<ExperimentReport>> pending;
  for (int r = 0; r < count; ++r) {
    pending.push_back(std::async(std::launch::async, experiment, seed + r));
  }
  for (auto& f : pending) out.push_back(f.get());
  return out;
}

double median_wall_clock(const ModelBundle& model, SamplerId sampler, long n_iter, long burn_in,
                         std::uint64_t seed, int repeats) {
  if (repeats < 1) throw Error(Errc::ConfigError, "need at least one timing run");
  std::vector<double> times;
  for (int r = 0; r < repeats; ++r) {
    SamplerConfig config;
    config.sampler = sampler;
    config.n_iterations = n_iter;
    config.burn_in = burn_in;
    config.seed = stream_seed(seed, 100 + r);
    times.push_back(run_chain(config, model).wall_clock_seconds);
  }
  std::nth_element(times.begin(), times.begin() + repeats / 2, times.end());
  return times[repeats / 2];
}

double exact_gibbs_index_autocorrelation(const ModelBundle& model,
                                         const Eigen::Ref<const Eigen::VectorXd>& grid, int lag) {
  // only pi* matters here; skip the G x G proposal slices
  const FiniteSpec spec = discretize(ModelBundle{model.target, std::nullopt, std::nullopt}, grid);
  const Kernel gibbs = build_gibbs_index_kernel(spec);
  Eigen::VectorXd h(spec.n);
  for (int m = 0; m < spec.n; ++m) h[m] = m;
  const Eigen::VectorXd cov = lag_covariances(gibbs.matrix, spec.index_marginal(), h, lag);
  if (!(cov[0] > 0.0)) throw Error(Errc::ConstantSeries, "index is degenerate under the target");
  return cov[lag] / cov[0];
}

}  // namespace ccmix
