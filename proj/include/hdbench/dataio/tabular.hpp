#pragma once

#include <algorithm>
#include <cctype>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "hdbench/dataio/dense.hpp"
#include "hdbench/error.hpp"

namespace hdbench {

enum class ColumnKind { text, number };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::text;

  friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

// monostate marks a missing cell.
using Cell = std::variant<std::monostate, double, std::string>;

inline bool is_missing(const Cell& c) { return std::holds_alternative<std::monostate>(c); }

/// Named-column table with typed, possibly missing cells.
class TabularFrame {
public:
  TabularFrame() = default;
  explicit TabularFrame(std::vector<ColumnSpec> columns) : columns_(std::move(columns)) {}

  const std::vector<ColumnSpec>& columns() const { return columns_; }
  std::size_t num_rows() const { return rows_.size(); }
  std::size_t num_columns() const { return columns_.size(); }

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (columns_[i].name == name) return i;
    }
    return std::nullopt;
  }

  std::size_t index_of(std::string_view name) const {
    auto idx = find(name);
    if (!idx) throw ConfigError("unknown column '" + std::string(name) + "'");
    return *idx;
  }

  const Cell& at(std::size_t row, std::size_t col) const { return rows_[row][col]; }
  Cell& at(std::size_t row, std::size_t col) { return rows_[row][col]; }
  const std::vector<Cell>& row(std::size_t r) const { return rows_[r]; }

  void add_row(std::vector<Cell> cells) {
    if (cells.size() != columns_.size()) throw DataError("row width does not match column count");
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const bool ok = is_missing(cells[c]) ||
                      (columns_[c].kind == ColumnKind::number ? std::holds_alternative<double>(cells[c])
                                                              : std::holds_alternative<std::string>(cells[c]));
      if (!ok) throw DataError("cell kind does not match column '" + columns_[c].name + "'");
    }
    rows_.push_back(std::move(cells));
  }

  void set_kind(std::size_t col, ColumnKind kind) { columns_[col].kind = kind; }

  // Keeps rows whose index is listed, in the given order.
  TabularFrame select_rows(const std::vector<std::size_t>& keep) const {
    TabularFrame out(columns_);
    out.rows_.reserve(keep.size());
    for (auto r : keep) out.rows_.push_back(rows_[r]);
    return out;
  }

  std::optional<std::string> text(std::size_t row, std::size_t col) const {
    if (const auto* s = std::get_if<std::string>(&rows_[row][col])) return *s;
    return std::nullopt;
  }
  std::optional<double> number(std::size_t row, std::size_t col) const {
    if (const auto* v = std::get_if<double>(&rows_[row][col])) return *v;
    return std::nullopt;
  }

  friend bool operator==(const TabularFrame&, const TabularFrame&) = default;

private:
  std::vector<ColumnSpec> columns_;
  std::vector<std::vector<Cell>> rows_;
};

/// RFC-4180-style record reader: comma separated, double-quote escaping,
/// doubled quotes inside quoted fields, quoted fields may span lines.
class CsvReader {
public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Returns false at end of input. `line()` is the 1-based line on which the
  // returned record started.
  bool next(std::vector<std::string>& fields) {
    fields.clear();
    int c = in_.get();
    if (c == std::char_traits<char>::eof()) return false;
    record_line_ = ++physical_line_;
    std::string field;
    bool quoted = false;
    bool after_quote = false;
    while (true) {
      if (c == std::char_traits<char>::eof()) {
        if (quoted) throw DataError("line " + std::to_string(record_line_) + ": unterminated quoted field");
        fields.push_back(std::move(field));
        return true;
      }
      const char ch = static_cast<char>(c);
      if (quoted) {
        if (ch == '"') {
          if (in_.peek() == '"') {
            field += '"';
            in_.get();
          } else {
            quoted = false;
            after_quote = true;
          }
        } else {
          if (ch == '\n') ++physical_line_;
          field += ch;
        }
      } else if (ch == ',') {
        fields.push_back(std::move(field));
        field.clear();
        after_quote = false;
      } else if (ch == '\n' || ch == '\r') {
        if (ch == '\r' && in_.peek() == '\n') in_.get();
        fields.push_back(std::move(field));
        return true;
      } else if (ch == '"' && field.empty() && !after_quote) {
        quoted = true;
      } else {
        if (after_quote) {
          throw DataError("line " + std::to_string(record_line_) + ": characters after closing quote");
        }
        field += ch;
      }
      c = in_.get();
    }
  }

  std::size_t line() const { return record_line_; }

private:
  std::istream& in_;
  std::size_t physical_line_ = 0;
  std::size_t record_line_ = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

inline bool is_missing_sentinel(std::string_view raw) {
  const auto s = trim(raw);
  return s.empty() || iequals(s, "NA") || iequals(s, "N/A");
}

}  // namespace detail

/// Parses a headered CSV into the given schema. Header columns not in the
/// schema are ignored; schema order defines the frame's column order.
inline TabularFrame parse_tabular(std::istream& in, const std::vector<ColumnSpec>& schema) {
  CsvReader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header)) throw DataError("missing header row");
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.size(); ++i) position.emplace(std::string(detail::trim(header[i])), i);

  std::vector<std::size_t> source;
  std::string absent;
  for (const auto& col : schema) {
    auto it = position.find(col.name);
    if (it == position.end()) {
      absent += absent.empty() ? col.name : ", " + col.name;
    } else {
      source.push_back(it->second);
    }
  }
  if (!absent.empty()) throw DataError("header is missing columns: " + absent);

  TabularFrame frame(schema);
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != header.size()) {
      throw DataError("line " + std::to_string(reader.line()) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(fields.size()));
    }
    std::vector<Cell> cells(schema.size());
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const std::string& raw = fields[source[c]];
      if (detail::is_missing_sentinel(raw)) continue;
      if (schema[c].kind == ColumnKind::text) {
        cells[c] = raw;
      } else {
        auto v = detail::parse_double(detail::trim(raw));
        if (!v) {
          throw DataError("line " + std::to_string(reader.line()) + ": column '" + schema[c].name +
                          "' is not numeric: '" + raw + "'");
        }
        cells[c] = *v;
      }
    }
    frame.add_row(std::move(cells));
  }
  return frame;
}

inline void write_csv_field(std::ostream& out, std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) {
    out << s;
    return;
  }
  out << '"';
  for (char c : s) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

// Missing cells are written as empty fields.
inline void write_tabular(std::ostream& out, const TabularFrame& frame) {
  for (std::size_t c = 0; c < frame.num_columns(); ++c) {
    if (c) out << ',';
    write_csv_field(out, frame.columns()[c].name);
  }
  out << '\n';
  for (std::size_t r = 0; r < frame.num_rows(); ++r) {
    for (std::size_t c = 0; c < frame.num_columns(); ++c) {
      if (c) out << ',';
      const Cell& cell = frame.at(r, c);
      if (const auto* v = std::get_if<double>(&cell)) {
        out << detail::shortest(*v);
      } else if (const auto* s = std::get_if<std::string>(&cell)) {
        write_csv_field(out, *s);
      }
    }
    out << '\n';
  }
}

// "$1,234" -> 1234, "ITL 45,000" -> 45000; nullopt when unconvertible.
inline std::optional<double> parse_currency(std::string_view raw) {
  std::string s;
  for (char c : detail::trim(raw)) {
    if (c != '$' && c != ',') s += c;
  }
  std::string_view v = detail::trim(s);
  std::size_t letters = 0;
  while (letters < v.size() && std::isalpha(static_cast<unsigned char>(v[letters]))) ++letters;
  if (letters >= 1 && letters <= 3 && letters < v.size()) v = detail::trim(v.substr(letters));
  return detail::parse_double(v);
}

/// Converts the named text columns to numbers by stripping currency symbols,
/// thousands separators, and a leading 1-3 letter currency code.
inline TabularFrame clean_currency(const TabularFrame& frame, const std::vector<std::string>& columns) {
  TabularFrame out = frame;
  for (const auto& name : columns) {
    const std::size_t c = frame.index_of(name);
    if (frame.columns()[c].kind != ColumnKind::text) {
      throw ConfigError("clean_currency: column '" + name + "' is not a text column");
    }
    out.set_kind(c, ColumnKind::number);
    for (std::size_t r = 0; r < frame.num_rows(); ++r) {
      Cell& cell = out.at(r, c);
      std::optional<double> v;
      if (const auto* s = std::get_if<std::string>(&cell)) v = parse_currency(*s);
      cell = v ? Cell(*v) : Cell(std::monostate{});
    }
  }
  return out;
}

}  // namespace hdbench
