#include "ccmix/samplers.hpp"

#include <chrono>
#include <cmath>

namespace ccmix {

namespace {

// Steps (i)-(ii) shared by the CC-type samplers: refresh the inactive
// components from their pseudo-priors and draw the next index.
struct IndexMove {
  std::vector<Point> u;
  int next = 0;
};

IndexMove refresh_and_select(const MixtureTarget& target, const PseudoPriorSet& pseudo,
                             const State& state, Rng& rng) {
  IndexMove move;
  move.u.resize(target.n());
  for (int j = 0; j < target.n(); ++j) {
    move.u[j] = j == state.m ? state.z : pseudo.sample(j, rng);
  }
  move.next = rng.categorical(cc_index_weights(target, pseudo, move.u));
  return move;
}

// One MH update of z targeting pi*(dz | l).
StepResult metropolis_update(const MixtureTarget& target, const ProposalFamily& proposal, int l,
                             const Point& current, Rng& rng) {
  Point candidate = proposal.sample(l, current, rng);
  const double log_alpha = mh_log_acceptance(target, proposal, l, current, candidate);
  const bool accept = log_alpha >= 0.0 || std::log(rng.uniform()) < log_alpha;
  if (accept) return {State{l, std::move(candidate)}, true};
  return {State{l, current}, false};
}

}  // namespace

std::string_view to_string(SamplerId id) {
  switch (id) {
    case SamplerId::Gibbs: return "gibbs";
    case SamplerId::MwG: return "mwg";
    case SamplerId::CC: return "cc";
    case SamplerId::MCC: return "mcc";
    case SamplerId::FCC: return "fcc";
  }
  return "unknown";
}

std::optional<SamplerId> parse_sampler_id(std::string_view name) {
  for (SamplerId id : kAllSamplers) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

State gibbs_step(const MixtureTarget& target, const State& state, Rng& rng) {
  if (!target.has_conditional_sampler()) {
    throw Error(Errc::MissingConditionalSampler, "Gibbs step needs exact conditional sampling");
  }
  const int next = rng.categorical(conditional_index_weights(target, state.z));
  return State{next, target.sample_conditional(next, rng)};
}

StepResult mwg_step(const MixtureTarget& target, const ProposalFamily& proposal,
                    const State& state, Rng& rng) {
  const int next = rng.categorical(conditional_index_weights(target, state.z));
  return metropolis_update(target, proposal, next, state.z, rng);
}

State cc_step(const MixtureTarget& target, const PseudoPriorSet& pseudo, const State& state,
              Rng& rng) {
  if (!target.has_conditional_sampler()) {
    throw Error(Errc::MissingConditionalSampler, "CC step needs exact conditional sampling");
  }
  const IndexMove move = refresh_and_select(target, pseudo, state, rng);
  return State{move.next, target.sample_conditional(move.next, rng)};
}

StepResult mcc_step(const MixtureTarget& target, const PseudoPriorSet& pseudo,
                    const ProposalFamily& proposal, const State& state, Rng& rng) {
  const IndexMove move = refresh_and_select(target, pseudo, state, rng);
  return metropolis_update(target, proposal, move.next, move.u[move.next], rng);
}

State fcc_step(const MixtureTarget& target, const PseudoPriorSet& pseudo, const State& state,
               Rng& rng) {
  IndexMove move = refresh_and_select(target, pseudo, state, rng);
  return State{move.next, std::move(move.u[move.next])};
}

void check_compatible(SamplerId id, const ModelBundle& model) {
  const bool needs_conditional = id == SamplerId::Gibbs || id == SamplerId::CC;
  const bool needs_pseudo = id == SamplerId::CC || id == SamplerId::MCC || id == SamplerId::FCC;
  const bool needs_proposal = id == SamplerId::MwG || id == SamplerId::MCC;
  const std::string name(to_string(id));
  if (needs_conditional && !model.target.has_conditional_sampler()) {
    throw Error(Errc::ConfigError, name + " needs an exact conditional sampler");
  }
  if (needs_pseudo && (!model.pseudo || model.pseudo->n() != model.target.n())) {
    throw Error(Errc::ConfigError, name + " needs one pseudo-prior per component");
  }
  if (needs_proposal && (!model.proposal || model.proposal->n() != model.target.n())) {
    throw Error(Errc::ConfigError, name + " needs one proposal kernel per component");
  }
}

StepResult step(SamplerId id, const ModelBundle& model, const State& state, Rng& rng) {
  check_compatible(id, model);
  switch (id) {
    case SamplerId::Gibbs: return {gibbs_step(model.target, state, rng), true};
    case SamplerId::MwG: return mwg_step(model.target, *model.proposal, state, rng);
    case SamplerId::CC: return {cc_step(model.target, *model.pseudo, state, rng), true};
    case SamplerId::MCC: return mcc_step(model.target, *model.pseudo, *model.proposal, state, rng);
    case SamplerId::FCC: return {fcc_step(model.target, *model.pseudo, state, rng), true};
  }
  throw Error(Errc::ConfigError, "unknown sampler");
}

void SamplerConfig::validate() const {
  if (n_iterations < 1) throw Error(Errc::ConfigError, "n_iterations must be positive");
  if (burn_in < 0 || burn_in >= n_iterations) {
    throw Error(Errc::ConfigError, "burn_in must lie in [0, n_iterations)");
  }
}

Eigen::VectorXd ChainTrace::index_series() const {
  Eigen::VectorXd out(size());
  for (Eigen::Index k = 0; k < size(); ++k) out[k] = states[k].m;
  return out;
}

Eigen::VectorXd ChainTrace::component_series(int coordinate) const {
  Eigen::VectorXd out(size());
  for (Eigen::Index k = 0; k < size(); ++k) out[k] = states[k].z[coordinate];
  return out;
}

namespace {

template <class StepFn>
ChainTrace drive(const SamplerConfig& config, State state, Rng& rng, StepFn&& advance) {
  ChainTrace trace;
  trace.sampler = config.sampler;
  trace.seed = config.seed;
  trace.burn_in = config.burn_in;
  trace.states.reserve(config.n_iterations - config.burn_in);

  long accepted = 0;
  const auto start = std::chrono::steady_clock::now();
  for (long k = 0; k < config.n_iterations; ++k) {
    StepResult result = advance(state, rng);
    state = std::move(result.state);
    if (k >= config.burn_in) {
      accepted += result.accepted ? 1 : 0;
      trace.states.push_back(state);
    }
  }
  const auto stop = std::chrono::steady_clock::now();
  trace.wall_clock_seconds = std::chrono::duration<double>(stop - start).count();
  if (config.sampler == SamplerId::MwG || config.sampler == SamplerId::MCC) {
    trace.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(trace.size());
  }
  return trace;
}

}  // namespace

ChainTrace run_chain(const SamplerConfig& config, const ModelBundle& model) {
  config.validate();
  check_compatible(config.sampler, model);
  const MixtureTarget& target = model.target;

  Rng rng(config.seed);
  State initial;
  if (config.initial_state) {
    initial = *config.initial_state;
  } else if (model.pseudo) {
    initial = State{0, model.pseudo->sample(0, rng)};
  } else if (target.has_conditional_sampler()) {
    initial = State{0, target.sample_conditional(0, rng)};
  } else {
    throw Error(Errc::ConfigError, "no way to draw a default initial state");
  }
  if (!is_valid(initial, target.n(), target.z_dim())) {
    throw Error(Errc::ConfigError, "initial state is outside the state space");
  }

  // resolve the kernel once, outside the timed loop
  switch (config.sampler) {
    case SamplerId::Gibbs:
      return drive(config, std::move(initial), rng, [&](const State& s, Rng& r) {
        return StepResult{gibbs_step(target, s, r), true};
      });
    case SamplerId::MwG:
      return drive(config, std::move(initial), rng, [&](const State& s, Rng& r) {
        return mwg_step(target, *model.proposal, s, r);
      });
    case SamplerId::CC:
      return drive(config, std::move(initial), rng, [&](const State& s, Rng& r) {
        return StepResult{cc_step(target, *model.pseudo, s, r), true};
      });
    case SamplerId::MCC:
      return drive(config, std::move(initial), rng, [&](const State& s, Rng& r) {
        return mcc_step(target, *model.pseudo, *model.proposal, s, r);
      });
    case SamplerId::FCC:
      return drive(config, std::move(initial), rng, [&](const State& s, Rng& r) {
        return StepResult{fcc_step(target, *model.pseudo, s, r), true};
      });
  }
  throw Error(Errc::ConfigError, "unknown sampler");
}

}  // namespace ccmix
