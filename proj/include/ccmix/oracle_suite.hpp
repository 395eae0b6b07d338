#pragma once

// Machine checks of the kernel identities on finite specs. Used by the CLI
// `oracle` command and the acceptance suite.

#include "ccmix/oracle.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ccmix {

struct OracleCheck {
  std::string name;
  double value = 0.0;  // worst case over the spec
  double bound = 0.0;
  bool at_most = true;  // pass iff value <= bound (else value >= bound)

  bool passed() const { return at_most ? value <= bound : value >= bound; }
};

struct OracleSuiteOptions {
  int random_functions = 100;
  int gibbs_max_lag = 200;
  std::uint64_t seed = 42;  // draws the random index functions
};

struct OracleSuiteReport {
  std::vector<OracleCheck> checks;

  bool passed() const;
  const OracleCheck& get(const std::string& name) const;
};

/// Reversibility of P3 and Q3, invariance of P3, P3Q3, P3Q4, the Q3 / Q4
/// orderings, MCC <= FCC asymptotic variance for the standard basis and
/// random index functions, and the Gibbs i.i.d. bound.
OracleSuiteReport verify_spec(const FiniteSpec& spec, const OracleSuiteOptions& options = {});

/// `count` random specs cycling through n in {2, 3} and G in {5, 10, 25}.
std::vector<FiniteSpec> randomized_specs(std::uint64_t seed, int count = 20);

}  // namespace ccmix
