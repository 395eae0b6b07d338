#include "ccmix/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace ccmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Entries equal to -inf get weight exactly 0.
Eigen::VectorXd normalize_log_weights(const Eigen::VectorXd& log_w) {
  const double max_log = log_w.maxCoeff();
  if (max_log == kNegInf) {
    throw Error(Errc::AllZeroMass, "every component has zero mass");
  }
  Eigen::VectorXd w(log_w.size());
  for (Eigen::Index i = 0; i < log_w.size(); ++i) {
    w[i] = log_w[i] == kNegInf ? 0.0 : std::exp(log_w[i] - max_log);
  }
  return w / w.sum();
}

}  // namespace

bool is_valid(const State& state, int n_components, int z_dim) {
  return state.m >= 0 && state.m < n_components && state.z.size() == z_dim &&
         state.z.allFinite();
}

MixtureTarget::MixtureTarget(int n, int z_dim, LogDensityFn log_density,
                             std::optional<DrawFn> conditional_sampler)
    : n_(n),
      z_dim_(z_dim),
      log_density_(std::move(log_density)),
      conditional_sampler_(std::move(conditional_sampler)) {
  if (n_ < 1 || z_dim_ < 1) {
    throw Error(Errc::ConfigError, "mixture target needs n >= 1 and z_dim >= 1");
  }
}

Point MixtureTarget::sample_conditional(int m, Rng& rng) const {
  if (!conditional_sampler_) {
    throw Error(Errc::MissingConditionalSampler,
                "target cannot sample pi*(dz | m); use a Metropolised sampler");
  }
  return (*conditional_sampler_)(m, rng);
}

PseudoPriorSet::PseudoPriorSet(int n, LogDensityFn log_density, DrawFn sampler)
    : n_(n), log_density_(std::move(log_density)), sampler_(std::move(sampler)) {
  if (n_ < 1) throw Error(Errc::ConfigError, "pseudo-prior set needs n >= 1");
}

ProposalFamily::ProposalFamily(int n, TransitionLogDensityFn log_density,
                               TransitionDrawFn sampler)
    : n_(n), log_density_(std::move(log_density)), sampler_(std::move(sampler)) {
  if (n_ < 1) throw Error(Errc::ConfigError, "proposal family needs n >= 1");
}

ProposalFamily independence_proposal(const PseudoPriorSet& pseudo) {
  return ProposalFamily(
      pseudo.n(),
      [pseudo](int l, const Point&, const Point& z) { return pseudo.log_density(l, z); },
      [pseudo](int l, const Point&, Rng& rng) { return pseudo.sample(l, rng); });
}

ProposalFamily delta_proposal(int n) {
  return ProposalFamily(
      n, [](int, const Point& u, const Point& z) { return u == z ? 0.0 : kNegInf; },
      [](int, const Point& u, Rng&) { return u; });
}

Eigen::VectorXd conditional_index_weights(const MixtureTarget& target, const Point& z) {
  Eigen::VectorXd log_w(target.n());
  for (int m = 0; m < target.n(); ++m) log_w[m] = target.log_density(m, z);
  return normalize_log_weights(log_w);
}

Eigen::VectorXd cc_index_weights(const MixtureTarget& target, const PseudoPriorSet& pseudo,
                                 const std::vector<Point>& u) {
  const int n = target.n();
  if (static_cast<int>(u.size()) != n || pseudo.n() != n) {
    throw Error(Errc::DimensionMismatch, "expected one auxiliary point per component");
  }
  Eigen::VectorXd log_target_all(n);
  for (int m = 0; m < n; ++m) log_target_all[m] = target.log_density(m, u[m]);
  // pivot on the largest target term first: keeps large additive shifts in log pi* out of the sum
  const double pivot = log_target_all.maxCoeff();
  Eigen::VectorXd log_w(n);
  for (int m = 0; m < n; ++m) {
    const double log_target = log_target_all[m];
    const double log_pseudo = pseudo.log_density(m, u[m]);
    if (log_pseudo == kNegInf) {
      if (log_target != kNegInf) {
        throw Error(Errc::PseudoPriorZero,
                    "pseudo-prior " + std::to_string(m) + " vanishes where the target does not");
      }
      log_w[m] = kNegInf;
      continue;
    }
    log_w[m] = std::isfinite(pivot) ? (log_target - pivot) - log_pseudo : log_target - log_pseudo;
  }
  return normalize_log_weights(log_w);
}

double mh_log_acceptance(const MixtureTarget& target, const ProposalFamily& proposal, int l,
                         const Point& u, const Point& z) {
  const double log_target_u = target.log_density(l, u);
  const double log_forward = proposal.log_density(l, u, z);
  if (log_target_u == kNegInf || log_forward == kNegInf) {
    throw Error(Errc::InvalidCurrentState, "current point has zero target or proposal density");
  }
  const double log_target_z = target.log_density(l, z);
  if (log_target_z == kNegInf) return kNegInf;
  const double log_backward = proposal.log_density(l, z, u);
  if (log_backward == kNegInf) return kNegInf;
  // grouped so that z == u gives exactly 0
  const double log_ratio = (log_target_z - log_target_u) + (log_backward - log_forward);
  return std::min(0.0, log_ratio);
}

double extended_log_density(const MixtureTarget& target, const PseudoPriorSet& pseudo, int m,
                            const std::vector<Point>& u) {
  if (static_cast<int>(u.size()) != target.n()) {
    throw Error(Errc::DimensionMismatch, "expected one auxiliary point per component");
  }
  double total = target.log_density(m, u[m]);
  for (int j = 0; j < target.n(); ++j) {
    if (j != m) total += pseudo.log_density(j, u[j]);
  }
  return std::isnan(total) ? kNegInf : total;
}

double log_normal_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * variance) + d * d / variance);
}

}  // namespace ccmix
