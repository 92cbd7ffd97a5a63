#pragma once

// Report emission. JSON documents are nested and machine-first; CSV tables
// are flat and plot-first. Numbers are written in the shortest form that
// reads back to the same double, so parse -> emit is byte-stable.

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "spikessm/error.hpp"

namespace spikessm::harness {

enum class Format { kJson, kCsv };

inline Format parse_format(std::string_view name) {
  if (name == "json") return Format::kJson;
  if (name == "csv") return Format::kCsv;
  throw ConfigError("unknown format '" + std::string(name) + "'");
}

inline std::string format_number(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error("number formatting failed");
  return std::string(buf, end);
}

class Table {
 public:
  Table() = default;
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const noexcept {
    return rows_;
  }

  void add_row(std::vector<std::string> row) {
    if (row.size() != columns_.size())
      throw ShapeError("row has " + std::to_string(row.size()) +
                       " cells, table has " + std::to_string(columns_.size()) +
                       " columns");
    rows_.push_back(std::move(row));
  }

  friend bool operator==(const Table&, const Table&) = default;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

// Cell helpers so call sites stay short.
inline std::string cell(double v) { return format_number(v); }
inline std::string cell(std::size_t v) { return std::to_string(v); }
inline std::string cell(bool v) { return v ? "true" : "false"; }
inline std::string cell(std::string_view v) { return std::string(v); }
inline std::string cell(const char* v) { return std::string(v); }

namespace detail {

inline bool needs_quotes(std::string_view field) {
  return field.find_first_of(",\"\n\r") != std::string_view::npos;
}

inline void write_field(std::string& out, std::string_view field) {
  if (!needs_quotes(field)) {
    out += field;
    return;
  }
  out += '"';
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

inline void write_record(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    write_field(out, cells[i]);
  }
  out += '\n';
}

}  // namespace detail

inline std::string to_csv(const Table& table) {
  std::string out;
  detail::write_record(out, table.columns());
  for (const auto& row : table.rows()) detail::write_record(out, row);
  return out;
}

// RFC 4180 reader: quoted fields, doubled quotes, LF or CRLF line ends.
inline Table parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
      field_started = false;
    } else {
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw ConfigError("unterminated quoted CSV field");
  if (field_started || !field.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  if (records.empty()) throw ConfigError("CSV has no header");
  Table table(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) table.add_row(records[r]);
  return table;
}

inline std::string to_json_text(const nlohmann::json& doc) {
  return doc.dump(2) + "\n";
}

// Writes to `path`, or to standard output when path is empty.
inline void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  out << text;
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace spikessm::harness
