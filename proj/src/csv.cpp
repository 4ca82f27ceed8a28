#include <fstream>
#include <istream>
#include <string>
#include <vector>

#include "mdd/error.hpp"
#include "mdd/model.hpp"

namespace mdd {

namespace {

// Reads one logical record; quoted fields may span lines. Returns false at
// end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields,
                 std::size_t& line_no) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  bool was_quoted = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line_no;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      if (!field.empty() || was_quoted) {
        fail(ErrorKind::format, "line " + std::to_string(line_no) +
                                    ": stray quote inside unquoted field");
      }
      in_quotes = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else if (c == '\n') {
      ++line_no;
      if (!field.empty() && field.back() == '\r' && !was_quoted) field.pop_back();
      fields.push_back(std::move(field));
      return true;
    } else {
      if (was_quoted && c != '\r') {
        fail(ErrorKind::format, "line " + std::to_string(line_no) +
                                    ": text after closing quote");
      }
      if (!(was_quoted && c == '\r')) field.push_back(c);
    }
  }
  if (in_quotes) {
    fail(ErrorKind::format, "unterminated quoted field at end of input");
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

}  // namespace

Relation parse_csv(std::istream& in) {
  std::vector<std::string> header;
  std::size_t line_no = 1;
  if (!read_record(in, header, line_no)) {
    fail(ErrorKind::format, "empty CSV input: header row required");
  }
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) {
    header[0].erase(0, 3);
  }
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> fields;
  while (read_record(in, fields, line_no)) {
    // A bare trailing newline yields one empty field; skip blank lines.
    if (fields.size() == 1 && fields[0].empty()) continue;
    rows.push_back(fields);
  }
  return Relation(std::move(header), std::move(rows));
}

Relation read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open '" + path + "'");
  return parse_csv(in);
}

}  // namespace mdd
