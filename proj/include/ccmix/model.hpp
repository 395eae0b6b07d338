#pragma once

// Mixture targets on {0..n-1} x R^d, pseudo-priors, proposal kernels and the
// probability computations shared by every sampler.
//
// Components are indexed from 0. Densities on Z are taken with respect to
// Lebesgue measure (or counting measure for discretized models); all
// arithmetic is carried out on log-densities.

#include "ccmix/core.hpp"
#include "ccmix/rng.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace ccmix {

struct State {
  int m = 0;
  Point z;
};

bool is_valid(const State& state, int n_components, int z_dim);

using LogDensityFn = std::function<double(int, const Point&)>;
using DrawFn = std::function<Point(int, Rng&)>;
using TransitionLogDensityFn = std::function<double(int, const Point&, const Point&)>;
using TransitionDrawFn = std::function<Point(int, const Point&, Rng&)>;

/// Possibly unnormalized density pi*(m, z). The conditional sampler, when
/// present, draws exactly from pi*(dz | m).
class MixtureTarget {
 public:
  MixtureTarget(int n, int z_dim, LogDensityFn log_density,
                std::optional<DrawFn> conditional_sampler = std::nullopt);

  int n() const { return n_; }
  int z_dim() const { return z_dim_; }
  double log_density(int m, const Point& z) const { return log_density_(m, z); }

  bool has_conditional_sampler() const { return conditional_sampler_.has_value(); }
  /// Throws MissingConditionalSampler when absent.
  Point sample_conditional(int m, Rng& rng) const;

 private:
  int n_;
  int z_dim_;
  LogDensityFn log_density_;
  std::optional<DrawFn> conditional_sampler_;
};

/// The linking densities rho_j, one proper density per component.
class PseudoPriorSet {
 public:
  PseudoPriorSet(int n, LogDensityFn log_density, DrawFn sampler);

  int n() const { return n_; }
  double log_density(int j, const Point& u) const { return log_density_(j, u); }
  Point sample(int j, Rng& rng) const { return sampler_(j, rng); }

 private:
  int n_;
  LogDensityFn log_density_;
  DrawFn sampler_;
};

/// Proposal kernels R_l(u, dz) with transition densities r_l(u, z).
class ProposalFamily {
 public:
  ProposalFamily(int n, TransitionLogDensityFn log_density, TransitionDrawFn sampler);

  int n() const { return n_; }
  double log_density(int l, const Point& u, const Point& z) const { return log_density_(l, u, z); }
  Point sample(int l, const Point& u, Rng& rng) const { return sampler_(l, u, rng); }

 private:
  int n_;
  TransitionLogDensityFn log_density_;
  TransitionDrawFn sampler_;
};

/// R_l(u, .) = rho_l regardless of u.
ProposalFamily independence_proposal(const PseudoPriorSet& pseudo);

/// R_l(u, .) = delta_u. The transition "density" is 0 on the diagonal in
/// log-space and -inf elsewhere, so every MH ratio it enters equals one.
ProposalFamily delta_proposal(int n);

/// Everything a sampler may need. Gibbs and CC require the conditional
/// sampler; CC-type samplers require pseudo-priors; MwG and MCC a proposal.
struct ModelBundle {
  MixtureTarget target;
  std::optional<PseudoPriorSet> pseudo;
  std::optional<ProposalFamily> proposal;
};

/// pi*(. | z) via max-subtracted log weights. Throws AllZeroMass.
Eigen::VectorXd conditional_index_weights(const MixtureTarget& target, const Point& z);

/// pi(. | u) of the extended target, entry m proportional to
/// pi*(m, u_m) / rho_m(u_m). A component where both numerator and
/// denominator vanish gets weight 0. Throws PseudoPriorZero if rho_m(u_m) = 0
/// while pi*(m, u_m) > 0, and AllZeroMass if every weight is 0.
Eigen::VectorXd cc_index_weights(const MixtureTarget& target, const PseudoPriorSet& pseudo,
                                 const std::vector<Point>& u);

/// log alpha_l(u, z) = min(0, log pi*(l,z) + log r_l(z,u) - log pi*(l,u) - log r_l(u,z)).
/// Returns -inf when z has zero target mass. Throws InvalidCurrentState when
/// pi*(l,u) = 0 or r_l(u,z) = 0.
double mh_log_acceptance(const MixtureTarget& target, const ProposalFamily& proposal, int l,
                         const Point& u, const Point& z);

/// log pi(m, u) = log pi*(m, u_m) + sum_{j != m} log rho_j(u_j).
double extended_log_density(const MixtureTarget& target, const PseudoPriorSet& pseudo, int m,
                            const std::vector<Point>& u);

double log_normal_pdf(double x, double mean, double variance);

}  // namespace ccmix
