#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mems/config.hpp"
#include "mems/errors.hpp"

namespace mems::csv {

// Minimal CSV emitter: header row, 17-significant-digit numbers, '.' decimal
// separator regardless of locale.
class Writer {
public:
  Writer(const std::string& path, const std::vector<std::string>& columns) : out_(path) {
    if (!out_) throw ArgumentError("cannot open for writing: " + path);
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out_ << ',';
      out_ << columns[i];
    }
    out_ << '\n';
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  static std::string num(double v) { return format_double(v); }

private:
  std::ofstream out_;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

inline Table read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open for reading: " + path);
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      t.columns = cells;
      first = false;
    } else {
      t.rows.push_back(cells);
    }
  }
  return t;
}

}  // namespace mems::csv
