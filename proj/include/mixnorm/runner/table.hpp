#pragma once

// Result tables and their CSV / JSON serialisation. Numbers are written with
// 17 significant digits so every double survives a text round trip.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "mixnorm/core/error.hpp"

namespace mixnorm::runner {

/// Empty cells (not applicable) are std::monostate.
using Cell = std::variant<std::monostate, std::string, long long, double>;

struct Table {
  std::string experiment;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;  // warnings for stderr, never serialised
};

inline std::string format_double(double v) {
  if (!std::isfinite(v)) throw NumericalAnomaly("non-finite value in results");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string json_escape(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

struct CellText {
  bool json;
  std::string operator()(std::monostate) const { return json ? "null" : ""; }
  std::string operator()(const std::string& s) const { return json ? json_escape(s) : csv_escape(s); }
  std::string operator()(long long v) const { return std::to_string(v); }
  std::string operator()(double v) const { return format_double(v); }
};

}  // namespace detail

inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) out += (c ? "," : "") + detail::csv_escape(t.columns[c]);
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + std::visit(detail::CellText{false}, row[c]);
    out += "\n";
  }
  return out;
}

inline std::string to_json(const Table& t) {
  std::string out = "[\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out += "  {";
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      out += (c ? ", " : "") + detail::json_escape(t.columns[c]) + ": " +
             std::visit(detail::CellText{true}, t.rows[r][c]);
    }
    out += r + 1 < t.rows.size() ? "},\n" : "}\n";
  }
  return out + "]\n";
}

/// Serialises the table; throws "no results" on an empty table.
inline std::string render(const Table& t, const std::string& format) {
  if (t.rows.empty()) throw ValidationError("rows", "no results");
  for (const auto& row : t.rows)
    if (row.size() != t.columns.size()) throw NumericalAnomaly("row width does not match the header");
  if (format == "csv") return to_csv(t);
  if (format == "json") return to_json(t);
  throw ValidationError("format", "unknown output format '" + format + "'");
}

/// Writes through a temporary file and renames, so a failed run never
/// leaves partial output behind.
inline void write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write to " + tmp + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path);
  }
}

inline void emit(const Table& t, const std::string& format, const std::string& path) {
  write_file(path, render(t, format));
}

}  // namespace mixnorm::runner
