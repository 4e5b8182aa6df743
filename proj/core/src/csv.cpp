#include "attrfuse/csv.hpp"

#include <fstream>
#include <stdexcept>

namespace attrfuse {

std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      if (!cur.empty())
        throw std::runtime_error("stray quote inside unquoted field");
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
    ++i;
  }
  if (quoted) throw std::runtime_error("unterminated quoted field");
  fields.push_back(cur);
  return fields;
}

std::string csv_escape(const std::string& field) {
  bool needs_quotes = false;
  for (char c : field) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!field.empty() && (field.front() == ' ' || field.back() == ' '))
    needs_quotes = true;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '\n' || c == '\r')
      throw std::runtime_error("embedded newlines are not supported in fields");
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header && line.empty()) continue;  // tolerate leading blank lines
    if (line.empty()) continue;
    std::vector<std::string> fields;
    try {
      fields = parse_csv_line(line);
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                               e.what());
    }
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
    } else {
      table.rows.push_back(std::move(fields));
      table.line_numbers.push_back(line_no);
    }
  }
  if (!have_header) throw std::runtime_error(path + ": empty file, no header");
  return table;
}

void write_csv_file(const std::string& path,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);  // binary: no CRLF translation
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  auto emit = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(fields[i]);
    }
    out << '\n';
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace attrfuse
