#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace fairaudit::csv {

struct Row {
  std::size_t line = 0;  // 1-based physical line where the record starts
  std::vector<std::string> fields;
};

struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;

  // Index of a header column; throws InputError when absent.
  std::size_t column(std::string_view name) const;
};

// RFC 4180 parsing: comma separated, double-quoted fields with "" escapes,
// CRLF or LF line endings, optional UTF-8 byte-order mark. Blank lines are
// skipped. Rows must have as many fields as the header.
Table parse(std::string_view text);
Table read_file(const std::string& path);

// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

}  // namespace fairaudit::csv
