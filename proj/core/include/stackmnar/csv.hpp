// Minimal CSV support: comma-delimited, header row required, UTF-8,
// no quoting. Cells are kept as strings; numeric conversion happens at
// the point of use so errors can name the offending cell.
#ifndef STACKMNAR_CSV_HPP
#define STACKMNAR_CSV_HPP

#include <string>
#include <vector>

namespace stackmnar::csv {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

// Throws std::runtime_error on: missing/empty file, ragged rows
// (message carries the 1-based data row number), duplicate column names.
Table read_file(const std::string& path);

// Round-trip-exact double formatting (%.17g).
std::string format_double(double x);

// Parses the full cell as a double; throws naming (row, column) on failure.
double parse_double(const std::string& cell, int row, const std::string& column);

}  // namespace stackmnar::csv

#endif
