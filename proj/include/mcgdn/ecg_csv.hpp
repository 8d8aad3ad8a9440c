#pragma once

#include <filesystem>
#include <istream>
#include <vector>

#include "mcgdn/signal.hpp"

namespace mcgdn {

/// Per-beat ECG table: one cycle per row, comma-separated decimals, rows may
/// differ in length. A final column that is integral on every row is taken to
/// be a class label and dropped.
struct EcgTable {
  std::vector<std::vector<double>> rows;
  bool label_column_dropped = false;
};

/// Rows of comma-separated decimals, no label handling. Throws
/// MalformedInput naming the 1-based row on bad fields or empty rows.
std::vector<std::vector<double>> parse_csv_rows(std::istream &in);

/// Throws MalformedInput naming the 1-based row on unparsable or non-finite
/// fields and on empty rows.
EcgTable parse_ecg_csv(std::istream &in);
EcgTable read_ecg_csv(const std::filesystem::path &path);

/// Preconditions every row. Cycle ids are "ecg-<row>" with the 1-based row.
/// Rows that are all zero or too short raise MalformedInput naming the row.
std::vector<EcgCycle> precondition_table(const EcgTable &table, double source_rate,
                                         std::size_t cycle_length, double target_rate);

}  // namespace mcgdn
