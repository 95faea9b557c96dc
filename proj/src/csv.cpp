#include "trilinear/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "trilinear/errors.hpp"

namespace trilinear::csv {

const std::vector<double>& Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return columns[i];
  }
  throw std::out_of_range("no CSV column named " + std::string(name));
}

void Table::add(std::string name, std::vector<double> values) {
  if (!columns.empty() && values.size() != rows()) {
    throw DomainError("cli", "CSV column " + name + " has the wrong length");
  }
  header.push_back(std::move(name));
  columns.push_back(std::move(values));
}

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0 so output does not depend on its sign
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(len));
}

void write(std::ostream& out, const Table& table) {
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    out << (c ? "," : "") << table.header[c];
  }
  out << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      out << (c ? "," : "") << format_number(table.columns[c][r]);
    }
    out << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_field(const std::string& s, std::size_t line_no) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  // ERANGE on underflow still yields the nearest subnormal, which is what
  // format_number wrote; only overflow is rejected.
  const bool overflow = errno == ERANGE && std::isinf(v);
  if (s.empty() || end != s.c_str() + s.size() || overflow) {
    throw DomainError("cli", "bad CSV number '" + s + "' on line " +
                                 std::to_string(line_no));
  }
  return v;
}

}  // namespace

Table read(std::istream& in) {
  Table table;
  std::string line;
  if (!std::getline(in, line)) throw DomainError("cli", "empty CSV input");
  table.header = split(line);
  table.columns.resize(table.header.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != table.header.size()) {
      throw DomainError("cli", "CSV line " + std::to_string(line_no) +
                                   " has the wrong number of fields");
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      table.columns[c].push_back(parse_field(fields[c], line_no));
    }
  }
  return table;
}

}  // namespace trilinear::csv
