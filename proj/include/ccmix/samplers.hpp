#pragma once

// The five transition kernels and the chain driver.
//
// Within one step the random draws are consumed in a fixed order: the
// pseudo-prior refresh of every inactive component (ascending index), one
// uniform for the index draw, then the continuous refresh (conditional draw,
// or proposal draw followed by one uniform only when the MH ratio is below
// one).

#include "ccmix/model.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace ccmix {

enum class SamplerId { Gibbs, MwG, CC, MCC, FCC };

inline constexpr SamplerId kAllSamplers[] = {SamplerId::Gibbs, SamplerId::MwG, SamplerId::CC,
                                             SamplerId::MCC, SamplerId::FCC};

std::string_view to_string(SamplerId id);
std::optional<SamplerId> parse_sampler_id(std::string_view name);

struct StepResult {
  State state;
  bool accepted = true;
};

State gibbs_step(const MixtureTarget& target, const State& state, Rng& rng);

StepResult mwg_step(const MixtureTarget& target, const ProposalFamily& proposal,
                    const State& state, Rng& rng);

State cc_step(const MixtureTarget& target, const PseudoPriorSet& pseudo, const State& state,
              Rng& rng);

StepResult mcc_step(const MixtureTarget& target, const PseudoPriorSet& pseudo,
                    const ProposalFamily& proposal, const State& state, Rng& rng);

State fcc_step(const MixtureTarget& target, const PseudoPriorSet& pseudo, const State& state,
               Rng& rng);

/// Dispatches on the sampler id. Throws ConfigError when the bundle lacks a
/// component the sampler needs.
StepResult step(SamplerId id, const ModelBundle& model, const State& state, Rng& rng);

/// Throws ConfigError if `id` cannot run on `model`.
void check_compatible(SamplerId id, const ModelBundle& model);

struct SamplerConfig {
  SamplerId sampler = SamplerId::FCC;
  long n_iterations = 101000;
  long burn_in = 1000;
  std::uint64_t seed = 42;
  /// Defaults to m = 0 with z drawn from pseudo-prior 0 (or, without
  /// pseudo-priors, from the exact conditional of component 0).
  std::optional<State> initial_state;

  void validate() const;
};

struct ChainTrace {
  SamplerId sampler = SamplerId::FCC;
  std::uint64_t seed = 0;
  long burn_in = 0;
  std::vector<State> states;  // post burn-in
  double wall_clock_seconds = 0.0;
  std::optional<double> acceptance_rate;  // MwG and MCC only

  Eigen::Index size() const { return static_cast<Eigen::Index>(states.size()); }
  Eigen::VectorXd index_series() const;
  Eigen::VectorXd component_series(int coordinate = 0) const;
};

ChainTrace run_chain(const SamplerConfig& config, const ModelBundle& model);

}  // namespace ccmix
