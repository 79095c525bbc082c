#include "archnet/io.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "archnet/text.hpp"

namespace archnet {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed for " + path);
}

void for_each_jsonl(const std::string& path,
                    const std::function<void(const json&, std::size_t)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(path, lineno, std::string("invalid JSON: ") + e.what());
    }
    fn(record, lineno);
  }
}

std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
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
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string csv_join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += csv_escape(fields[i]);
  }
  return out;
}

void for_each_csv_row(
    const std::string& path, const std::vector<std::string>& expected,
    const std::function<void(const std::vector<std::string>&, std::size_t)>&
        fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) return;  // empty file: no header, no rows
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = parse_csv_line(line);
  if (header.size() < expected.size())
    throw ParseError(path, 0, "header has too few columns");
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (trim(header[i]) != expected[i])
      throw ParseError(path, 0,
                       "expected header column \"" + expected[i] +
                           "\", found \"" + header[i] + "\"");
  }
  std::size_t rowno = 0;
  while (std::getline(in, line)) {
    ++rowno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = parse_csv_line(line);
    if (fields.size() < expected.size())
      throw ParseError(path, rowno, "row has too few columns");
    fn(fields, rowno);
  }
}

void log_warning(const std::string& message) {
  std::cerr << "warning: " << message << "\n";
}

}  // namespace archnet
