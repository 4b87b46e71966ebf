#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace nativqa {

// RFC-4180-ish reader: quoted fields, embedded commas/quotes/newlines,
// CRLF tolerated. Throws ParseError (with the line number) on a stray or
// unterminated quote.
struct CsvRow {
  std::vector<std::string> fields;
  std::size_t line_no = 0;  // 1-based line the row starts on
};

class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Next row, or nullopt at end of input. Fully blank lines are skipped.
  std::optional<CsvRow> next();

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

std::string csv_escape(const std::string& field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace nativqa
