#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace gibbslab {

using Cell = std::variant<std::int64_t, double, std::string>;

/// Column-named rows written as CSV (12 significant digits) or as a JSON
/// array of objects carrying the same values.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

std::string format_cell(const Cell& c);
std::string to_csv(const Table& t);
std::string to_json(const Table& t);

/// Parses CSV written by to_csv back into cells (numbers where they parse).
Table parse_csv(const std::string& text);

/// Writes `<dir>/<stem>.csv` or `.json`; returns the path.
std::string write_table(const Table& t, const std::string& dir, const std::string& stem, const std::string& format);

Table covariance_table();   // i, j, dist, value, stderr, method
Table coefficient_table();  // d, R, quantity, offset, value, bound, ratio
Table bootstrap_table();    // iteration, dist, max_bound, C_fit, alpha_fit, coupling, L
Table key_value_table();    // key, value

}  // namespace gibbslab
