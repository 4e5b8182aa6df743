#ifndef ATTRFUSE_CSV_HPP
#define ATTRFUSE_CSV_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace attrfuse {

// Minimal RFC-4180-style CSV. Fields containing the delimiter, a double
// quote, or leading/trailing whitespace are quoted on write; quotes are
// doubled. Embedded newlines are not supported (one logical row per line).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row
};

CsvTable read_csv_file(const std::string& path);

// Parses one line; throws std::runtime_error on unterminated quotes.
std::vector<std::string> parse_csv_line(const std::string& line);

std::string csv_escape(const std::string& field);

void write_csv_file(const std::string& path,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);

}  // namespace attrfuse

#endif
