#pragma once

// The two numerical studies: a two-component Gaussian mixture with
// well-separated strata, and a partially observed mixture whose posterior
// has no tractable conditional for z given m.

#include "ccmix/diagnostics.hpp"
#include "ccmix/model.hpp"
#include "ccmix/samplers.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ccmix {

struct ToyParams {
  std::array<double, 2> mu{-1.0, 1.0};
  double sigma2 = 0.2;
  std::array<double, 2> pseudo_mu{-0.5, 0.5};
  std::array<double, 2> pseudo_sigma2{0.15, 0.25};
};

/// pi*(m, z) = 1/2 N(z; mu_m, sigma2) with Gaussian pseudo-priors and the
/// independence proposal R_l(u, .) = rho_l.
ModelBundle toy_target(const ToyParams& params = {});

/// Same target with rho_l = pi*(. | l) = N(mu_l, sigma2).
ModelBundle toy_target_optimal(const ToyParams& params = {});

/// Proposal r_l(u, z) = N(z; mean_l, var_l) independent of u.
ProposalFamily gaussian_independence_proposal(std::array<double, 2> mean, std::array<double, 2> var);

struct PosteriorParams {
  std::array<double, 2> alpha{0.25, 0.75};
  std::array<double, 2> mu{-1.0, 1.0};
  double sigma2 = 0.2;
  double noise_var = 0.1;  // X = Z^2 + noise
};

/// Latent mixture observed through a measurement density g.
struct ObservationModel {
  std::function<double(int, double, double)> log_g;  // (m, z, x) -> log g((m,z), x)
  double x_obs = 0.4;
  MixtureTarget prior;
};

ObservationModel observation_model(double x_obs = 0.4, const PosteriorParams& params = {});

/// Unnormalized posterior pi*(m, z) ∝ alpha_m N(z; mu_m, sigma2) N(x; z^2, noise_var).
/// No conditional sampler; pseudo-priors and proposals are the prior
/// conditionals N(mu_m, sigma2).
ModelBundle posterior_target(double x_obs = 0.4, const PosteriorParams& params = {});

struct TruePosterior {
  double mu_z = 0.0;
  double normalizing_constant = 0.0;
  Eigen::VectorXd density;  // marginal pi*(z) on the requested grid
  long intervals = 0;       // Simpson intervals at convergence
};

/// Evenly spaced [-3, 3] at step 0.005.
Eigen::VectorXd default_density_grid();

/// Composite Simpson quadrature over [-3, 3], doubling the interval count
/// until the Richardson estimate of the error is below quad_tol (relative).
/// Throws ConfigError if `grid` does not cover [-3, 3] at step <= 0.005,
/// QuadratureNotConverged on failure to converge or when the mass outside
/// [-3, 3] cannot be bounded below 1e-12.
TruePosterior true_posterior(double x_obs, const Eigen::Ref<const Eigen::VectorXd>& grid,
                             double quad_tol = 1e-10, const PosteriorParams& params = {});

struct SamplerSummary {
  SamplerId sampler = SamplerId::FCC;
  AcfEstimate acf_index;
  AcfEstimate acf_z;
  double mean_z = 0.0;
  std::optional<double> acceptance;
  double wall_clock_s = 0.0;
};

struct DensityComparison {
  Eigen::VectorXd grid;
  Eigen::VectorXd kde;
  Eigen::VectorXd exact;

  double sup_distance() const { return (kde - exact).cwiseAbs().maxCoeff(); }
};

struct ExperimentReport {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<SamplerSummary> samplers;
  std::optional<double> true_mean_z;
  std::optional<DensityComparison> density;

  /// Throws ConfigError if the sampler was not part of the run.
  const SamplerSummary& get(SamplerId id) const;
};

SamplerSummary summarize(const ChainTrace& trace, int max_lag = kDefaultMaxLag);

/// Seed of sampler `id` inside an experiment seeded with `seed`.
std::uint64_t sampler_seed(std::uint64_t seed, SamplerId id);

/// Gibbs, CC, MCC and FCC on the toy model.
ExperimentReport run_toy_experiment(std::uint64_t seed, long n_iter = 101000, long burn_in = 1000,
                                    const ToyParams& params = {});

/// MwG, MCC and FCC on the posterior model, plus quadrature ground truth and
/// a kernel density estimate of the FCC z-trace.
ExperimentReport run_posterior_experiment(std::uint64_t seed, long n_iter = 101000,
                                          long burn_in = 1000, double x_obs = 0.4,
                                          const PosteriorParams& params = {});

/// Runs `experiment(seed + r)` for r = 0..count-1. Replicates run
/// concurrently when `parallel` is set; timing-sensitive callers keep it off.
std::vector<ExperimentReport> replicate(std::uint64_t seed, int count,
                                        const std::function<ExperimentReport(std::uint64_t)>& experiment,
                                        bool parallel = false);

/// Median wall-clock seconds over `repeats` runs of one sampler.
double median_wall_clock(const ModelBundle& model, SamplerId sampler, long n_iter, long burn_in,
                         std::uint64_t seed, int repeats = 5);

/// Lag-k autocorrelation of the Gibbs index chain of `model`, computed exactly
/// on a grid discretization of Z.
double exact_gibbs_index_autocorrelation(const ModelBundle& model,
                                         const Eigen::Ref<const Eigen::VectorXd>& grid, int lag = 1);

}  // namespace ccmix
