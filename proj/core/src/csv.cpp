#include "pandemic/csv.hpp"

#include <charconv>
#include <cmath>

#include "pandemic/error.hpp"

namespace pandemic {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buffer[32];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc{}) fail(Errc::InvalidArgument, "cannot format number");
  return std::string(buffer, end);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
  if (header.empty()) fail(Errc::InvalidArgument, "CSV header must not be empty");
  for (const auto& name : header) append(name);
  end_row();
  rows_ = 0;
}

CsvWriter& CsvWriter::cell(double value) {
  append(format_number(value));
  return *this;
}

CsvWriter& CsvWriter::cell(std::size_t value) {
  append(std::to_string(value));
  return *this;
}

CsvWriter& CsvWriter::cell(std::string_view text) {
  append(text);
  return *this;
}

void CsvWriter::end_row() {
  if (column_ != width_) {
    fail(Errc::InvalidArgument, "CSV row has " + std::to_string(column_) + " fields, expected " +
                                    std::to_string(width_));
  }
  text_ += '\n';
  column_ = 0;
  ++rows_;
}

void CsvWriter::append(std::string_view field) {
  if (column_ > 0) text_ += ',';
  ++column_;
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    text_ += field;
    return;
  }
  text_ += '"';
  for (char ch : field) {
    if (ch == '"') text_ += '"';
    text_ += ch;
  }
  text_ += '"';
}

}  // namespace pandemic
