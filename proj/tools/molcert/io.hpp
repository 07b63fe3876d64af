#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace molcert::cli {

/// Shortest decimal text that reads back to the same double.
std::string num(double x);

std::string read_file(const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// 64-bit FNV-1a, hex encoded; used to fingerprint inputs in the sidecar.
std::string fingerprint(std::string_view bytes);

/// Comma-separated table with a header row. Blank lines are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// 1-based file line of each row, for error messages.
  std::vector<std::size_t> lines;

  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;
  double number(std::size_t row, std::size_t col) const;
};

CsvTable parse_csv(std::string_view text);

std::vector<std::string> split(std::string_view s, char sep);

}  // namespace molcert::cli
