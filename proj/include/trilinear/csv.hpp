#pragma once

// Numeric CSV: one header line, comma separators, '.' decimals, 17
// significant digits, LF line endings. Everything written here is readable
// by read_csv.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace trilinear::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;  // one vector per header entry

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  /// Throws std::out_of_range for an unknown column.
  const std::vector<double>& column(std::string_view name) const;
  void add(std::string name, std::vector<double> values);
};

std::string format_number(double value);

void write(std::ostream& out, const Table& table);

/// Throws trilinear::DomainError on ragged rows or non-numeric fields.
Table read(std::istream& in);

}  // namespace trilinear::csv
