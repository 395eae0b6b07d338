#include "ccmix/oracle.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

namespace ccmix {

namespace {

void write_row(std::ostream& out, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    if (i > 0) out << '\t';
    out << row[i];
  }
  out << '\n';
}

std::vector<double> parse_row(const std::string& line, int line_no) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const std::size_t end = std::min(line.find('\t', pos), line.size());
    const std::string field = line.substr(pos, end - pos);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
      throw Error(Errc::ParseError,
                  "line " + std::to_string(line_no) + ": bad number '" + field + "'");
    }
    values.push_back(value);
    pos = end + 1;
  }
  return values;
}

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows, const std::string& section) {
  if (rows.empty()) throw Error(Errc::ParseError, "section #" + section + " is missing or empty");
  const auto cols = rows.front().size();
  Eigen::MatrixXd out(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw Error(Errc::ParseError, "ragged rows in section #" + section);
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = rows[r][c];
  }
  return out;
}

}  // namespace

void write_spec(std::ostream& out, const FiniteSpec& spec) {
  spec.validate();
  std::ostringstream buffer;
  buffer.imbue(std::locale::classic());
  buffer.precision(17);
  buffer << "#grid\n";
  write_row(buffer, spec.grid.transpose());
  buffer << "#pi\n";
  for (int m = 0; m < spec.n; ++m) write_row(buffer, spec.prob.row(m));
  buffer << "#pseudo\n";
  for (int j = 0; j < spec.n; ++j) write_row(buffer, spec.pseudo.row(j));
  buffer << "#proposal\n";
  for (int l = 0; l < spec.n; ++l) {
    for (int i = 0; i < spec.grid_size(); ++i) write_row(buffer, spec.proposal[l].row(i));
  }
  out << buffer.str();
  if (!out) throw Error(Errc::IoError, "failed to write spec");
}

FiniteSpec read_spec(std::istream& in) {
  std::map<std::string, std::vector<std::vector<double>>> sections;
  std::string current;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line.front() == '#') {
      current = line.substr(1);
      if (current != "grid" && current != "pi" && current != "pseudo" && current != "proposal") {
        throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": unknown section " + line);
      }
      if (sections.count(current)) throw Error(Errc::ParseError, "duplicate section " + line);
      sections[current];
      continue;
    }
    if (current.empty()) throw Error(Errc::ParseError, "data before the first section header");
    sections[current].push_back(parse_row(line, line_no));
  }

  FiniteSpec spec;
  const Eigen::MatrixXd grid = to_matrix(sections["grid"], "grid");
  if (grid.rows() != 1) throw Error(Errc::ParseError, "#grid must be a single row");
  spec.grid = grid.row(0).transpose();
  spec.prob = to_matrix(sections["pi"], "pi");
  spec.pseudo = to_matrix(sections["pseudo"], "pseudo");
  spec.n = static_cast<int>(spec.prob.rows());
  const Eigen::MatrixXd stacked = to_matrix(sections["proposal"], "proposal");
  const int g_count = spec.grid_size();
  if (stacked.rows() != Eigen::Index(spec.n) * g_count || stacked.cols() != g_count) {
    throw Error(Errc::ParseError, "#proposal must have n*G rows of G values");
  }
  for (int l = 0; l < spec.n; ++l) spec.proposal.push_back(stacked.middleRows(Eigen::Index(l) * g_count, g_count));

  // text round-off: accept 1e-9 and renormalize, but leave 17-digit output alone
  spec.validate(1e-9);
  constexpr double kExact = 1e-13;
  if (std::abs(spec.prob.sum() - 1.0) > kExact) spec.prob /= spec.prob.sum();
  for (int j = 0; j < spec.n; ++j) {
    if (std::abs(spec.pseudo.row(j).sum() - 1.0) > kExact) spec.pseudo.row(j) /= spec.pseudo.row(j).sum();
  }
  for (auto& slice : spec.proposal) {
    for (Eigen::Index i = 0; i < slice.rows(); ++i) {
      if (std::abs(slice.row(i).sum() - 1.0) > kExact) slice.row(i) /= slice.row(i).sum();
    }
  }
  return spec;
}

}  // namespace ccmix
