#pragma once

// Delimited-text tables with a header row. The delimiter (tab or comma) is
// detected from the header. Fields may be double-quoted; "" escapes a quote.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fpcontrol/errors.hpp"

namespace fpc::io {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  char delimiter = ',';

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    return std::nullopt;
  }

  std::size_t require_column(std::string_view name) const {
    if (auto c = find(name)) return *c;
    std::string have;
    for (const auto& c : columns) have += (have.empty() ? "" : ", ") + c;
    throw InputError("missing required column '" + std::string(name) + "' (columns: " + have + ")");
  }

  // Values must parse completely as finite reals; missing values are errors.
  std::vector<double> numeric_column(std::string_view name) const {
    const std::size_t c = require_column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const std::string& cell = rows[r][c];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw InputError("row " + std::to_string(r + 2) + ", column '" + std::string(name) +
                         "': expected a finite number, got '" + cell + "'");
      }
      out.push_back(v);
    }
    return out;
  }

  std::vector<std::string> string_column(std::string_view name) const {
    const std::size_t c = require_column(name);
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row[c]);
    return out;
  }

  void add_column(std::string name, const std::vector<std::string>& values) {
    if (values.size() != rows.size()) throw InputError("add_column: length mismatch for '" + name + "'");
    columns.push_back(std::move(name));
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r].push_back(values[r]);
  }
};

/// Shortest decimal form that reads back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::vector<std::string> format_column(const std::vector<double>& v) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (double x : v) out.push_back(format_double(x));
  return out;
}

namespace detail {

inline std::vector<std::string> split_line(std::string_view line, char delim, std::size_t lineno) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"' && cur.empty()) {
      quoted = true;
    } else if (ch == delim) {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (quoted) throw InputError("line " + std::to_string(lineno) + ": unterminated quoted field");
  out.push_back(std::move(cur));
  return out;
}

inline std::string quote_if_needed(const std::string& s, char delim) {
  if (s.find(delim) == std::string::npos && s.find('"') == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace detail

inline Table read_table(std::istream& in) {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header) {
      if (line.empty()) continue;
      t.delimiter = line.find('\t') != std::string::npos ? '\t' : ',';
      t.columns = detail::split_line(line, t.delimiter, lineno);
      for (auto& c : t.columns) {
        const auto b = c.find_first_not_of(' ');
        const auto e = c.find_last_not_of(' ');
        c = b == std::string::npos ? std::string{} : c.substr(b, e - b + 1);
      }
      header = true;
      continue;
    }
    if (line.empty()) continue;
    auto fields = detail::split_line(line, t.delimiter, lineno);
    if (fields.size() != t.columns.size()) {
      throw InputError("line " + std::to_string(lineno) + ": expected " + std::to_string(t.columns.size()) +
                       " fields, found " + std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
  }
  if (!header) throw InputError("table has no header row");
  return t;
}

inline Table read_table_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return read_table(in);
}

inline void write_table(std::ostream& out, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out << t.delimiter;
    out << detail::quote_if_needed(t.columns[i], t.delimiter);
  }
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << t.delimiter;
      out << detail::quote_if_needed(row[i], t.delimiter);
    }
    out << '\n';
  }
}

inline std::string to_string(const Table& t) {
  std::ostringstream out;
  write_table(out, t);
  return out.str();
}

}  // namespace fpc::io
