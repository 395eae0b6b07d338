#pragma once

// Command-line front end: `oracle`, `toy` and `posterior` commands plus the
// CSV artifacts they write.

#include "ccmix/experiments.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ccmix {

enum class Command { Oracle, Toy, Posterior };

struct RunConfig {
  Command command = Command::Toy;
  std::uint64_t seed = 42;
  long iterations = 101000;
  long burn_in = 1000;
  std::filesystem::path output_dir = "results";
  std::optional<std::filesystem::path> spec_file;
  int replicates = 10;
  bool help = false;  // --help was given; nothing else is meaningful
};

/// Parses argv (argv[0] is the program name). Throws Error(UsageError) on
/// unknown flags, bad values or iterations <= burn_in.
RunConfig parse_args(const std::vector<std::string>& argv);
RunConfig parse_args(int argc, const char* const* argv);

std::string usage();

/// Writes acf_<sampler>_<m|z>.csv, summary.csv and, for posterior runs,
/// density.csv into output_dir (created if missing). Throws IoError.
/// Returns the written paths.
std::vector<std::filesystem::path> emit_reports(const ExperimentReport& report,
                                                const std::filesystem::path& output_dir);

/// Reads back what emit_reports wrote. Run metadata that is not part of the
/// CSV set (seed, ACF series length) comes back as zero.
ExperimentReport read_reports(const std::filesystem::path& output_dir);

/// Runs a parsed configuration. Returns the process exit code: 0 iff the
/// command succeeded (for `oracle`, iff every check passed), 1 otherwise.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run; usage errors exit 2.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ccmix
