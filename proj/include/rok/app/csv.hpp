#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rok::app {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Comma-separated writer. Fields containing a comma, quote or newline are
/// quoted; empty optionals are written as empty fields.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(const std::vector<std::string>& names);
  CsvWriter& field(const std::string& v);
  CsvWriter& field(const char* v) { return field(std::string(v)); }
  CsvWriter& field(double v);
  CsvWriter& field(long long v);
  CsvWriter& field(std::size_t v) { return field(static_cast<long long>(v)); }
  CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
  CsvWriter& field(bool v);
  CsvWriter& field(const std::optional<double>& v);
  void end_row();

 private:
  void sep();
  std::ostream& out_;
  bool row_started_ = false;
};

}  // namespace rok::app
