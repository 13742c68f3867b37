#include <array>
#include <charconv>
#include <cmath>
#include <ostream>

#include "rok/app/csv.hpp"

namespace rok::app {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void CsvWriter::header(const std::vector<std::string>& names) {
  for (const auto& n : names) field(n);
  end_row();
}

void CsvWriter::sep() {
  if (row_started_) out_ << ',';
  row_started_ = true;
}

CsvWriter& CsvWriter::field(const std::string& v) {
  sep();
  if (v.find_first_of(",\"\n\r") == std::string::npos) {
    out_ << v;
    return *this;
  }
  out_ << '"';
  for (char c : v) {
    if (c == '"') out_ << '"';
    out_ << c;
  }
  out_ << '"';
  return *this;
}

CsvWriter& CsvWriter::field(double v) {
  sep();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::field(long long v) {
  sep();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::field(bool v) {
  sep();
  out_ << (v ? "true" : "false");
  return *this;
}

CsvWriter& CsvWriter::field(const std::optional<double>& v) {
  sep();
  if (v) out_ << format_double(*v);
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  row_started_ = false;
}

}  // namespace rok::app
