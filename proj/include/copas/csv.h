// SPDX-License-Identifier: Apache-2.0
//
// Minimal CSV and file helpers: UTF-8, LF, mandatory header, '.' decimals.

#ifndef COPAS_CSV_H_
#define COPAS_CSV_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace copas {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  std::optional<std::size_t> column(std::string_view name) const;
  std::size_t require_column(std::string_view name) const;
};

// Splits one CSV line; double-quoted fields may contain commas and "".
std::vector<std::string> split_csv_line(std::string_view line);

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path &path);

std::string read_text_file(const std::filesystem::path &path);

// Writes via a temporary file in the same directory followed by a rename.
void write_file_atomic(const std::filesystem::path &path, std::string_view content);

// Quotes a field when it contains a comma, quote or newline.
std::string csv_escape(std::string_view field);

double parse_double(std::string_view text, std::string_view what);

// Shortest round-trip decimal representation.
std::string format_double(double value);

} // namespace copas

#endif // COPAS_CSV_H_
