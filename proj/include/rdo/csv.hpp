#pragma once

#include <span>
#include <string>
#include <vector>

namespace rdo {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

/// Minimal CSV table: a header row and string cells. No quoting is needed
/// for the identifiers and numbers this project writes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::size_t column(const std::string& name) const;  // throws if absent
  double number(std::size_t row, std::size_t col) const;
  std::string to_string() const;
};

CsvTable read_csv(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace rdo
