#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace tiltsense::cli {

enum class Format { csv, json };

using Cell = std::variant<double, std::uint64_t, std::string>;

/// Fixed-schema result table. Column order is part of the output contract.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view name) const;
};

/// Round-trip scientific notation with 17 significant digits, independent
/// of the C locale. Non-finite values print as nan, inf, -inf.
std::string format_number(double v);

std::string to_csv(const Table& table);
std::string to_json_text(const Table& table);

/// Parses CSV written by to_csv; every cell comes back as a string.
struct CsvData {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view name) const;
};
CsvData parse_csv(const std::string& text);
CsvData read_csv(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Writes <dir>/<stem>.csv (or .json) and a <file>.meta.json sidecar that
/// merges `meta` with the column list and row count. Returns the data path.
std::filesystem::path write_table(const Table& table, const std::filesystem::path& dir,
                                  const std::string& stem, Format format,
                                  const nlohmann::json& meta);

}  // namespace tiltsense::cli
