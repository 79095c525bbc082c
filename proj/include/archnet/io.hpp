#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "archnet/errors.hpp"

namespace archnet {

using json = nlohmann::json;

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Calls fn(record, line_number) for every non-blank line. Line numbers are
// 1-based; malformed JSON raises ParseError naming the line.
void for_each_jsonl(const std::string& path,
                    const std::function<void(const json&, std::size_t)>& fn);

// RFC-4180-ish CSV: quoted fields may contain commas, quotes double up.
std::vector<std::string> parse_csv_line(const std::string& line);
std::string csv_escape(const std::string& field);
std::string csv_join(const std::vector<std::string>& fields);

// Reads a CSV file with a mandatory header row. fn receives the parsed
// fields and the 1-based data row number (header excluded). The header is
// checked against `expected` as a prefix; extra trailing columns pass.
void for_each_csv_row(
    const std::string& path, const std::vector<std::string>& expected,
    const std::function<void(const std::vector<std::string>&, std::size_t)>& fn);

void log_warning(const std::string& message);

}  // namespace archnet
