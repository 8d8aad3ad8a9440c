#include "mcgdn/ecg_csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

#include "mcgdn/error.hpp"

namespace mcgdn {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<double> parse_row(std::string_view line, std::size_t row) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= line.size()) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) comma = line.size();
    std::string_view field = trim(line.substr(start, comma - start));
    double v = 0.0;
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
      fail(ErrorKind::MalformedInput, "row " + std::to_string(row) + ": cannot parse field '" +
                                          std::string(field) + "'");
    }
    if (!std::isfinite(v)) {
      fail(ErrorKind::MalformedInput, "row " + std::to_string(row) + ": non-finite value");
    }
    values.push_back(v);
    start = comma + 1;
  }
  return values;
}

}  // namespace

std::vector<std::vector<double>> parse_csv_rows(std::istream &in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    std::string_view view = trim(line);
    if (view.empty()) {
      // A blank final line is a formatting artifact, not a row.
      if (in.peek() == std::char_traits<char>::eof()) break;
      fail(ErrorKind::MalformedInput, "row " + std::to_string(row) + ": empty row");
    }
    rows.push_back(parse_row(view, row));
  }
  if (rows.empty()) fail(ErrorKind::MalformedInput, "no rows in table");
  return rows;
}

EcgTable parse_ecg_csv(std::istream &in) {
  EcgTable table;
  table.rows = parse_csv_rows(in);

  bool all_integral = true;
  for (const auto &r : table.rows) {
    if (r.size() < 2 || std::floor(r.back()) != r.back()) {
      all_integral = false;
      break;
    }
  }
  if (all_integral) {
    for (auto &r : table.rows) r.pop_back();
    table.label_column_dropped = true;
  }
  return table;
}

EcgTable read_ecg_csv(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  return parse_ecg_csv(in);
}

std::vector<EcgCycle> precondition_table(const EcgTable &table, double source_rate,
                                         std::size_t cycle_length, double target_rate) {
  std::vector<EcgCycle> cycles;
  cycles.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const std::size_t row = i + 1;
    try {
      cycles.push_back(precondition_cycle(table.rows[i], source_rate, "ecg-" + std::to_string(row),
                                          cycle_length, target_rate));
    } catch (const Error &e) {
      if (e.kind() == ErrorKind::AllZeroSignal || e.kind() == ErrorKind::BadLength) {
        fail(ErrorKind::MalformedInput, "row " + std::to_string(row) + ": " + e.what());
      }
      throw;
    }
  }
  return cycles;
}

}  // namespace mcgdn
