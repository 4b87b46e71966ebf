#include "nativqa/csv.hpp"

#include "nativqa/errors.hpp"

namespace nativqa {

std::optional<CsvRow> CsvReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }

    CsvRow row;
    row.line_no = line_no_;
    std::string field;
    bool in_quotes = false;
    std::size_t i = 0;
    while (true) {
      if (i >= line.size()) {
        if (in_quotes) {
          // Quoted field spans a newline: pull the next physical line in.
          std::string more;
          if (!std::getline(in_, more)) {
            throw ParseError("unterminated quoted field starting at line " +
                             std::to_string(row.line_no));
          }
          ++line_no_;
          if (!more.empty() && more.back() == '\r') {
            more.pop_back();
          }
          field.push_back('\n');
          line = std::move(more);
          i = 0;
          continue;
        }
        break;
      }
      char c = line[i];
      if (in_quotes) {
        if (c == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field.push_back('"');
            i += 2;
          } else {
            in_quotes = false;
            ++i;
          }
        } else {
          field.push_back(c);
          ++i;
        }
      } else if (c == '"') {
        if (!field.empty()) {
          throw ParseError("stray quote in unquoted field at line " +
                           std::to_string(line_no_));
        }
        in_quotes = true;
        ++i;
      } else if (c == ',') {
        row.fields.push_back(std::move(field));
        field.clear();
        ++i;
      } else {
        field.push_back(c);
        ++i;
      }
    }
    row.fields.push_back(std::move(field));
    return row;
  }
  return std::nullopt;
}

std::string csv_escape(const std::string& field) {
  bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs_quotes) {
    return field;
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') {
      out += "\"\"";
    } else {
      out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.put(',');
    out << csv_escape(fields[i]);
  }
  out.put('\n');
}

}  // namespace nativqa
