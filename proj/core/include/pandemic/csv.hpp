#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pandemic {

/// Shortest decimal text that reads back to exactly `value`. Negative zero is
/// written as "0"; non-finite values as "nan", "inf" and "-inf".
std::string format_number(double value);

/// Builds a CSV document in memory: header row first, LF line endings, fields
/// quoted only when they contain a comma, quote or line break.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  CsvWriter& cell(double value);
  CsvWriter& cell(std::size_t value);
  CsvWriter& cell(std::string_view text);
  /// Closes the current row. Throws InvalidArgument if its width differs
  /// from the header.
  void end_row();

  std::size_t rows() const noexcept { return rows_; }
  const std::string& str() const noexcept { return text_; }

 private:
  void append(std::string_view field);

  std::size_t width_;
  std::size_t column_ = 0;
  std::size_t rows_ = 0;
  std::string text_;
};

}  // namespace pandemic
