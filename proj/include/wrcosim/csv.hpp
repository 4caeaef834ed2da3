#pragma once

#include <span>
#include <string>
#include <vector>

namespace wrcosim {

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

/// Comma-separated table built row by row; output is byte-stable.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::span<const double> values);
  std::size_t rows() const { return rows_; }
  const std::string& str() const { return text_; }

 private:
  std::size_t columns_;
  std::size_t rows_ = 0;
  std::string text_;
};

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace wrcosim
