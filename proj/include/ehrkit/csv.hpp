#pragma once

#include <istream>
#include <string>
#include <vector>

namespace ehrkit {

// Incremental RFC-4180 reader. Fields may be double-quoted; quoted fields may
// contain commas, escaped quotes ("") and newlines. Accepts both \n and \r\n
// record terminators.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Reads one record. Returns false at end of input. `start_line` receives
  // the 1-based physical line on which the record began (multi-line quoted
  // fields advance the line counter).
  bool next(std::vector<std::string>& fields, std::size_t& start_line);

 private:
  std::istream& in_;
  std::size_t line_ = 1;
};

}  // namespace ehrkit
