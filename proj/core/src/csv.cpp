#include "copref/csv.hpp"

#include "copref/errors.hpp"

namespace copref {

bool CsvReader::next(std::vector<std::string>& fields) {
  fields.clear();
  int c = in_.get();
  if (first_read_) {
    first_read_ = false;
    // UTF-8 BOM
    if (c == 0xEF && in_.peek() == 0xBB) {
      in_.get();
      if (in_.peek() == 0xBF) {
        in_.get();
        c = in_.get();
      }
    }
  }
  if (c == EOF) return false;
  record_line_ = line_;

  std::string field;
  bool quoted = false;
  while (true) {
    if (quoted) {
      if (c == EOF) throw input_error("unterminated quoted field at line " +
                                      std::to_string(record_line_));
      if (c == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line_;
        field += static_cast<char>(c);
      }
    } else {
      if (c == EOF || c == '\n') {
        if (c == '\n') ++line_;
        if (!field.empty() && field.back() == '\r') field.pop_back();
        fields.push_back(field);
        return true;
      }
      if (c == ',') {
        fields.push_back(field);
        field.clear();
      } else if (c == '"' && field.empty()) {
        quoted = true;
      } else {
        field += static_cast<char>(c);
      }
    }
    c = in_.get();
  }
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

}  // namespace copref
