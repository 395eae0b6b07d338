#include "ccmix/cli.hpp"

#include "ccmix/oracle_suite.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace ccmix {

namespace fs = std::filesystem;

namespace {

// Shortest round-trip decimal; never locale dependent.
std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error(Errc::IoError, "cannot format number");
  return std::string(buf, ptr);
}

double parse_number(const std::string& field, const fs::path& file) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(Errc::ParseError, file.string() + ": bad number '" + field + "'");
  }
  return value;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma - pos));
    if (comma == std::string::npos) return out;
    pos = comma + 1;
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  file << content;
  file.close();
  if (!file) throw Error(Errc::IoError, "failed writing " + path.string());
}

// Rows after the header; checks the header matches exactly.
std::vector<std::vector<std::string>> read_csv(const fs::path& path, const std::string& header) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error(Errc::IoError, "cannot open " + path.string());
  std::string line;
  if (!std::getline(file, line) || line != header) {
    throw Error(Errc::ParseError, path.string() + ": expected header '" + header + "'");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(file, line)) {
    if (!line.empty()) rows.push_back(split(line));
  }
  return rows;
}

std::string acf_csv(const AcfEstimate& acf) {
  std::string out = "lag,value\n";
  for (std::size_t k = 0; k < acf.lags.size(); ++k) {
    out += std::to_string(acf.lags[k]) + ',' + format_number(acf.values[static_cast<Eigen::Index>(k)]) + '\n';
  }
  return out;
}

AcfEstimate read_acf(const fs::path& path) {
  const auto rows = read_csv(path, "lag,value");
  AcfEstimate acf;
  acf.values.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].size() != 2) throw Error(Errc::ParseError, path.string() + ": expected 2 columns");
    acf.lags.push_back(static_cast<int>(parse_number(rows[k][0], path)));
    acf.values[static_cast<Eigen::Index>(k)] = parse_number(rows[k][1], path);
  }
  return acf;
}

constexpr const char* kSummaryHeader = "sampler,mean_z,acceptance,wallclock_s";
constexpr const char* kDensityHeader = "z,kde,exact";
constexpr const char* kTruthRow = "truth";

std::string acf_name(SamplerId id, char component) {
  return "acf_" + std::string(to_string(id)) + '_' + component + ".csv";
}

void print_replicate_table(const std::vector<ExperimentReport>& reports, std::ostream& out) {
  const auto count = static_cast<double>(reports.size());
  out << "sampler  acf1_m(mean +- se)      mean_z(mean +- se)      acceptance  median_wallclock_s\n";
  for (const SamplerSummary& first : reports.front().samplers) {
    std::vector<double> acf1;
    std::vector<double> mean_z;
    std::vector<double> clock;
    double acceptance = 0.0;
    for (const ExperimentReport& r : reports) {
      const SamplerSummary& s = r.get(first.sampler);
      acf1.push_back(s.acf_index.at(1));
      mean_z.push_back(s.mean_z);
      clock.push_back(s.wall_clock_s);
      acceptance += s.acceptance.value_or(NAN);
    }
    auto mean_se = [count](const std::vector<double>& v) {
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= count;
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      const double se = count > 1 ? std::sqrt(ss / (count - 1) / count) : 0.0;
      std::ostringstream s;
      s.precision(4);
      s << std::fixed << mean << " +- " << se;
      return s.str();
    };
    std::nth_element(clock.begin(), clock.begin() + clock.size() / 2, clock.end());
    std::ostringstream line;
    line.precision(4);
    line << std::fixed;
    line.width(9);
    line << std::left << std::string(to_string(first.sampler));
    line.width(24);
    line << mean_se(acf1);
    line.width(24);
    line << mean_se(mean_z);
    line.width(12);
    if (first.acceptance) {
      line << acceptance / count;
    } else {
      line << "-";
    }
    line << clock[clock.size() / 2];
    out << line.str() << '\n';
  }
  if (reports.front().true_mean_z) {
    out << "true mean_z = " << format_number(*reports.front().true_mean_z) << '\n';
  }
}

int run_oracle(const RunConfig& config, std::ostream& out, std::ostream& err) {
  std::vector<FiniteSpec> specs;
  if (config.spec_file) {
    std::ifstream file(*config.spec_file);
    if (!file) throw Error(Errc::IoError, "cannot open spec file " + config.spec_file->string());
    specs.push_back(read_spec(file));
  } else {
    specs = randomized_specs(config.seed);
  }
  OracleSuiteOptions options;
  options.seed = config.seed;
  std::string first_failure;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const OracleSuiteReport report = verify_spec(specs[i], options);
    out << "spec " << i << " (n=" << specs[i].n << ", G=" << specs[i].grid_size() << "): "
        << (report.passed() ? "PASS" : "FAIL") << '\n';
    for (const OracleCheck& c : report.checks) {
      out << "  " << (c.passed() ? "pass " : "FAIL ") << c.name << " = " << c.value
          << (c.at_most ? " <= " : " >= ") << c.bound << '\n';
      if (!c.passed() && first_failure.empty()) {
        first_failure = "spec " + std::to_string(i) + ": " + c.name + " violated";
      }
    }
  }
  if (!first_failure.empty()) {
    err << "oracle suite failed: " << first_failure << '\n';
    return 1;
  }
  out << "oracle suite passed on " << specs.size() << " spec(s)\n";
  return 0;
}

int run_experiment(const RunConfig& config, std::ostream& out) {
  const bool toy = config.command == Command::Toy;
  const long iters = config.iterations;
  const long burn = config.burn_in;
  std::function<ExperimentReport(std::uint64_t)> experiment;
  if (toy) {
    experiment = [iters, burn](std::uint64_t s) { return run_toy_experiment(s, iters, burn); };
  } else {
    experiment = [iters, burn](std::uint64_t s) { return run_posterior_experiment(s, iters, burn); };
  }
  // posterior replicates stay sequential so wall-clock numbers are comparable
  const auto reports = replicate(config.seed, config.replicates, experiment, toy);
  const auto written = emit_reports(reports.front(), config.output_dir);
  print_replicate_table(reports, out);
  if (reports.front().density) {
    out << "kde sup distance (seed " << config.seed << ") = "
        << format_number(reports.front().density->sup_distance()) << '\n';
  }
  out << "wrote " << written.size() << " files to " << config.output_dir.string() << '\n';
  return 0;
}

}  // namespace

std::string usage() {
  return "usage: ccmix {oracle|toy|posterior} [--seed N] [--iters N] [--burn-in N] [--out DIR]\n"
         "             [--spec FILE] [--replicates N]\n";
}

RunConfig parse_args(int argc, const char* const* argv) {
  RunConfig config;
  CLI::App app{"Carlin-Chib type samplers for mixture targets", "ccmix"};
  std::string command;
  std::string out_dir = config.output_dir.string();
  std::string spec;
  app.add_option("command", command, "oracle, toy or posterior")
      ->required()
      ->check(CLI::IsMember({"oracle", "toy", "posterior"}));
  app.add_option("--seed", config.seed, "base seed");
  app.add_option("--iters", config.iterations, "iterations per chain, burn-in included")
      ->check(CLI::PositiveNumber);
  app.add_option("--burn-in", config.burn_in, "discarded leading iterations")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--spec", spec, "finite spec file (oracle only)");
  app.add_option("--replicates", config.replicates, "independent seeds")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    config.help = true;
    return config;
  } catch (const CLI::ParseError& e) {
    throw Error(Errc::UsageError, e.what());
  }
  config.command = command == "oracle" ? Command::Oracle
                   : command == "toy"  ? Command::Toy
                                       : Command::Posterior;
  config.output_dir = out_dir;
  if (!spec.empty()) {
    if (config.command != Command::Oracle) throw Error(Errc::UsageError, "--spec applies to oracle only");
    config.spec_file = spec;
  }
  if (config.iterations <= config.burn_in) {
    throw Error(Errc::UsageError, "--iters must exceed --burn-in");
  }
  return config;
}

RunConfig parse_args(const std::vector<std::string>& argv) {
  std::vector<const char*> raw;
  raw.reserve(argv.size());
  for (const std::string& a : argv) raw.push_back(a.c_str());
  return parse_args(static_cast<int>(raw.size()), raw.data());
}

std::vector<fs::path> emit_reports(const ExperimentReport& report, const fs::path& output_dir) {
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec || !fs::is_directory(output_dir)) {
    throw Error(Errc::IoError, "cannot create output directory " + output_dir.string());
  }
  std::vector<fs::path> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file(output_dir / name, content);
    written.push_back(output_dir / name);
  };

  std::string summary = std::string(kSummaryHeader) + '\n';
  for (const SamplerSummary& s : report.samplers) {
    emit(acf_name(s.sampler, 'm'), acf_csv(s.acf_index));
    emit(acf_name(s.sampler, 'z'), acf_csv(s.acf_z));
    summary += std::string(to_string(s.sampler)) + ',' + format_number(s.mean_z) + ',' +
               (s.acceptance ? format_number(*s.acceptance) : std::string()) + ',' +
               format_number(s.wall_clock_s) + '\n';
  }
  if (report.true_mean_z) summary += std::string(kTruthRow) + ',' + format_number(*report.true_mean_z) + ",,\n";
  emit("summary.csv", summary);

  if (report.density) {
    const DensityComparison& d = *report.density;
    std::string density = std::string(kDensityHeader) + '\n';
    for (Eigen::Index i = 0; i < d.grid.size(); ++i) {
      density += format_number(d.grid[i]) + ',' + format_number(d.kde[i]) + ',' + format_number(d.exact[i]) + '\n';
    }
    emit("density.csv", density);
  }
  return written;
}

ExperimentReport read_reports(const fs::path& output_dir) {
  ExperimentReport report;
  const fs::path summary_path = output_dir / "summary.csv";
  for (const auto& row : read_csv(summary_path, kSummaryHeader)) {
    if (row.size() != 4) throw Error(Errc::ParseError, "summary.csv: expected 4 columns");
    if (row[0] == kTruthRow) {
      report.true_mean_z = parse_number(row[1], summary_path);
      continue;
    }
    const auto id = parse_sampler_id(row[0]);
    if (!id) throw Error(Errc::ParseError, "summary.csv: unknown sampler '" + row[0] + "'");
    SamplerSummary s;
    s.sampler = *id;
    s.mean_z = parse_number(row[1], summary_path);
    if (!row[2].empty()) s.acceptance = parse_number(row[2], summary_path);
    s.wall_clock_s = parse_number(row[3], summary_path);
    s.acf_index = read_acf(output_dir / acf_name(s.sampler, 'm'));
    s.acf_z = read_acf(output_dir / acf_name(s.sampler, 'z'));
    report.samplers.push_back(std::move(s));
  }
  const fs::path density_path = output_dir / "density.csv";
  if (fs::exists(density_path)) {
    const auto rows = read_csv(density_path, kDensityHeader);
    DensityComparison d;
    const auto size = static_cast<Eigen::Index>(rows.size());
    d.grid.resize(size);
    d.kde.resize(size);
    d.exact.resize(size);
    for (Eigen::Index i = 0; i < size; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      if (row.size() != 3) throw Error(Errc::ParseError, "density.csv: expected 3 columns");
      d.grid[i] = parse_number(row[0], density_path);
      d.kde[i] = parse_number(row[1], density_path);
      d.exact[i] = parse_number(row[2], density_path);
    }
    report.density = std::move(d);
  }
  report.name = report.density ? "posterior" : "toy";
  return report;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.help) {
    out << usage();
    return 0;
  }
  try {
    if (config.command == Command::Oracle) return run_oracle(config, out, err);
    return run_experiment(config, out);
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return 1;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = parse_args(argc, argv);
  } catch (const Error& e) {
    err << e.what() << '\n' << usage();
    return 2;
  }
  return run(config, out, err);
}

}  // namespace ccmix
