#pragma once

#include <istream>
#include <string>
#include <vector>

namespace copref {

// Minimal RFC-4180 style CSV reader: quoted fields, doubled-quote escapes,
// embedded commas and newlines, CRLF and UTF-8 BOM tolerated.
class CsvReader {
public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  /// Reads the next record into `fields`. Returns false at end of input.
  /// Throws input_error on an unterminated quoted field.
  bool next(std::vector<std::string>& fields);

  /// 1-based line number where the last record started.
  std::size_t record_line() const { return record_line_; }

private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 1;
  bool first_read_ = true;
};

/// Quotes a field for CSV output when it contains a comma, quote, or newline.
std::string csv_quote(const std::string& field);

}  // namespace copref
