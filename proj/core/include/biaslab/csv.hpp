#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace biaslab {

/// One CSV cell: a double (serialized with 17 significant digits, NaN spelled
/// "nan") or a string (quoted only when it needs to be).
using CsvCell = std::variant<double, std::string>;

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<CsvCell>> rows;

  void add_row(std::vector<CsvCell> row);
};

std::string format_csv_cell(const CsvCell& cell);
std::string to_csv_string(const CsvTable& table);
void write_csv(const CsvTable& table, const std::filesystem::path& path);

struct ParsedCsv {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int column_index(const std::string& name) const;  // -1 when absent
};
ParsedCsv read_csv(const std::filesystem::path& path);

/// FNV-1a 64-bit digest, hex-encoded; used for manifest checksums.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace biaslab
