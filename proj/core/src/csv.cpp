#include "stackmnar/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

namespace stackmnar::csv {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

Table read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);

  Table t;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty file (no header row): " + path);
  }
  strip_cr(line);
  t.columns = split_line(line);

  std::set<std::string> seen;
  for (const auto& name : t.columns) {
    if (!seen.insert(name).second) {
      throw std::runtime_error("duplicate column name '" + name + "' in " + path);
    }
  }

  int row = 0;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (line.empty() && in.eof()) break;
    ++row;
    auto cells = split_line(line);
    if (cells.size() != t.columns.size()) {
      throw std::runtime_error("ragged row " + std::to_string(row) + " in " + path +
                               ": expected " + std::to_string(t.columns.size()) +
                               " cells, got " + std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double parse_double(const std::string& cell, int row, const std::string& column) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || cell.empty()) {
    throw std::runtime_error("cannot parse '" + cell + "' as a number at row " +
                             std::to_string(row) + ", column '" + column + "'");
  }
  return value;
}

}  // namespace stackmnar::csv
