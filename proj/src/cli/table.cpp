#include "tiltsense/cli/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tiltsense::cli {
namespace {

std::string cell_text(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
  if (const auto* u = std::get_if<std::uint64_t>(&cell)) return std::to_string(*u);
  return std::get<std::string>(cell);
}

bool needs_quotes(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string csv_field(const std::string& s) {
  if (!needs_quotes(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::size_t find_column(const std::vector<std::string>& columns, std::string_view name) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw std::out_of_range("no column '" + std::string(name) + "'");
}

double parse_number(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  return v;
}

}  // namespace

std::size_t Table::column(std::string_view name) const { return find_column(columns, name); }

double Table::number(std::size_t row, std::string_view name) const {
  const Cell& cell = rows.at(row).at(column(name));
  if (const auto* d = std::get_if<double>(&cell)) return *d;
  if (const auto* u = std::get_if<std::uint64_t>(&cell)) return static_cast<double>(*u);
  return parse_number(std::get<std::string>(cell));
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_field(table.columns[i]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_field(cell_text(row[i]));
    }
    out += '\n';
  }
  return out;
}

std::string to_json_text(const Table& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      const std::string& key = table.columns[i];
      if (const auto* d = std::get_if<double>(&row[i])) {
        obj[key] = std::isfinite(*d) ? nlohmann::json(*d) : nlohmann::json(format_number(*d));
      } else if (const auto* u = std::get_if<std::uint64_t>(&row[i])) {
        obj[key] = *u;
      } else {
        obj[key] = std::get<std::string>(row[i]);
      }
    }
    rows.push_back(std::move(obj));
  }
  nlohmann::json doc = {{"columns", table.columns}, {"rows", std::move(rows)}};
  return doc.dump(2) + "\n";
}

std::size_t CsvData::column(std::string_view name) const { return find_column(columns, name); }

double CsvData::number(std::size_t row, std::string_view name) const {
  return parse_number(rows.at(row).at(column(name)));
}

CsvData parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    any = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (any) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  CsvData data;
  if (records.empty()) return data;
  data.columns = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != data.columns.size()) {
      throw std::invalid_argument("CSV row " + std::to_string(r) + " has " +
                                  std::to_string(records[r].size()) + " fields, expected " +
                                  std::to_string(data.columns.size()));
    }
    data.rows.push_back(std::move(records[r]));
  }
  return data;
}

CsvData read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::filesystem::path write_table(const Table& table, const std::filesystem::path& dir,
                                  const std::string& stem, Format format,
                                  const nlohmann::json& meta) {
  const bool csv = format == Format::csv;
  const std::filesystem::path path = dir / (stem + (csv ? ".csv" : ".json"));
  write_text(path, csv ? to_csv(table) : to_json_text(table));
  nlohmann::json sidecar = meta;
  sidecar["file"] = path.filename().string();
  sidecar["columns"] = table.columns;
  sidecar["rows"] = table.rows.size();
  write_text(dir / (path.filename().string() + ".meta.json"), sidecar.dump(2) + "\n");
  return path;
}

}  // namespace tiltsense::cli
