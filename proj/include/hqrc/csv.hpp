#pragma once

#include "hqrc/types.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hqrc {

/// Deterministic number formatting shared by every CSV cell ("%.17g" round
/// trips doubles exactly).
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Minimal CSV writer: one header row, then data rows. All numeric cells are
/// checked finite.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    columns_ = header.size();
    write_row_(header);
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_)
      throw std::logic_error("CsvWriter: row width does not match the header");
    write_row_(cells);
  }

  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) {
      if (!std::isfinite(v)) throw std::runtime_error("CsvWriter: non-finite cell");
      cells.push_back(format_number(v));
    }
    row(cells);
  }

 private:
  void write_row_(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  std::ofstream out_;
  size_t columns_ = 0;
};

}  // namespace hqrc
