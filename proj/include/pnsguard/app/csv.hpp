#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pnsguard::app {

/// Shortest decimal text that parses back to exactly `v` ('.' decimal,
/// scientific notation where shorter). Non-finite values print as nan/inf.
std::string format_number(double v);

/// CSV output: a '#'-prefixed metadata block, one header row, data rows.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void comment(std::string_view text);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);

 private:
  std::ostream& out_;
  std::size_t columns_ = 0;
};

struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Throws std::out_of_range for an unknown column.
  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view name) const;
};

/// Parses the format written by CsvWriter.
CsvTable parse_csv(std::string_view text);

/// Everything except metadata comment lines.
std::string data_section(std::string_view text);

}  // namespace pnsguard::app
