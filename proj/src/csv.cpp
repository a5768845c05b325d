#include "ehrkit/csv.hpp"

namespace ehrkit {

bool CsvReader::next(std::vector<std::string>& fields, std::size_t& start_line) {
  fields.clear();
  int c = in_.get();
  if (c == EOF) return false;
  start_line = line_;

  std::string field;
  bool quoted = false;
  while (true) {
    if (c == EOF) {
      fields.push_back(std::move(field));
      return true;
    }
    if (quoted) {
      if (c == '"') {
        int peek = in_.peek();
        if (peek == '"') {
          field.push_back('"');
          in_.get();
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line_;
        field.push_back(static_cast<char>(c));
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      ++line_;
      if (!field.empty() && field.back() == '\r') field.pop_back();
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(static_cast<char>(c));
    }
    c = in_.get();
  }
}

}  // namespace ehrkit
