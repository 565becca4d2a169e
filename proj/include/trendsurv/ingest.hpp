#pragma once

#include <cctype>
#include <charconv>
#include <cstdio>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "trendsurv/series.hpp"

namespace trendsurv {

struct ManifestEntry {
  std::string id;            // ascii slug, unique across the manifest
  std::string display_name;  // UTF-8
  std::string language;      // BCP-47 tag
  std::vector<std::string> variants;
};

struct SymptomManifest {
  std::vector<ManifestEntry> entries;
};

struct CaseColumnMap {
  std::string date_column = "date";
  std::string value_column = "cases";
  std::string date_format = "%Y-%m-%d";
};

struct TrendsParseOptions {
  double censored_value = 0.5;  // midpoint stand-in for the "<1" token
  MissingPolicy missing = MissingPolicy::error;
};

namespace csv {

// RFC-4180-style line splitting; quoted fields may hold commas and "" escapes.
inline std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

inline std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline bool parse_number(std::string_view text, double& out) {
  const std::string t = trim(text);
  const char* begin = t.data();
  const char* end = begin + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

// Quote a cell only when it needs quoting.
inline std::string escape(std::string_view cell) {
  if (cell.find_first_of(",\"\n") == std::string_view::npos) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

// Shortest exact decimal form; integers print without a fraction.
inline std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  for (int prec = 1; prec < 17; ++prec) {
    char probe[32];
    std::snprintf(probe, sizeof probe, "%.*g", prec, v);
    double back = 0.0;
    if (parse_number(probe, back) && back == v) return probe;
  }
  return buf;
}

}  // namespace csv

namespace detail {

// "cough: (Atlantis)" -> "cough"; labels without the suffix pass through.
inline std::string strip_geo_suffix(std::string_view header_cell) {
  if (!header_cell.empty() && header_cell.back() == ')') {
    const auto pos = header_cell.rfind(": (");
    if (pos != std::string_view::npos) return std::string(header_cell.substr(0, pos));
  }
  return std::string(header_cell);
}

}  // namespace detail

// Parses a trend export: optional preamble lines, then a blank line, then a
// `Day,<query>: (<geo>),...` header, then `YYYY-MM-DD,v,...` rows where each
// v is 0..100 or the censored token `<1`. One series per query column.
inline std::vector<DailySeries> parse_trends_csv(std::istream& in,
                                                 const TrendsParseOptions& opts = {}) {
  const auto lines = csv::read_lines(in);
  std::size_t header_idx = lines.size();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto cells = csv::split_line(lines[i]);
    if (!cells.empty() && cells[0] == "Day") {
      header_idx = i;
      break;
    }
  }
  if (header_idx == lines.size()) {
    throw Error(Errc::malformed_header, "no `Day` header row found");
  }
  const auto header = csv::split_line(lines[header_idx]);
  if (header.size() < 2) {
    throw Error(Errc::malformed_header, "header has no query columns");
  }
  const std::size_t n_cols = header.size() - 1;
  std::vector<std::string> labels(n_cols);
  for (std::size_t c = 0; c < n_cols; ++c) labels[c] = detail::strip_geo_suffix(header[c + 1]);

  std::vector<std::vector<DatedValue>> columns(n_cols);
  for (std::size_t i = header_idx + 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto cells = csv::split_line(lines[i]);
    if (cells.size() != header.size()) {
      throw Error(Errc::malformed_document, "row " + std::to_string(i + 1) + " has " +
                                                std::to_string(cells.size()) + " cells, expected " +
                                                std::to_string(header.size()));
    }
    const auto date = parse_date(cells[0]);
    if (!date) throw Error(Errc::unparsable_date, "bad date `" + cells[0] + "`");
    for (std::size_t c = 0; c < n_cols; ++c) {
      const std::string cell = csv::trim(cells[c + 1]);
      double value;
      if (cell == "<1") {
        value = opts.censored_value;
      } else if (!csv::parse_number(cell, value)) {
        throw Error(Errc::non_numeric_cell, "cell `" + cell + "` in column " + labels[c]);
      } else if (value < 0.0 || value > 100.0) {
        throw Error(Errc::value_out_of_range,
                    "value " + cell + " outside [0,100] in column " + labels[c]);
      }
      columns[c].push_back({*date, value});
    }
  }
  std::vector<DailySeries> out;
  out.reserve(n_cols);
  for (std::size_t c = 0; c < n_cols; ++c) {
    if (columns[c].empty()) throw Error(Errc::empty_input, "no data rows");
    out.push_back(fill_missing(columns[c], opts.missing, labels[c]));
  }
  return out;
}

// Daily new confirmed cases from a header-carrying CSV with configurable
// date/value column names and date pattern.
inline DailySeries parse_cases_csv(std::istream& in, const CaseColumnMap& map,
                                   MissingPolicy policy = MissingPolicy::error) {
  if (map.date_column.empty() || map.value_column.empty()) {
    throw Error(Errc::bad_argument, "column names must be non-empty");
  }
  const auto lines = csv::read_lines(in);
  std::size_t first = 0;
  while (first < lines.size() && lines[first].empty()) ++first;
  if (first == lines.size()) throw Error(Errc::empty_input, "empty file");
  const auto header = csv::split_line(lines[first]);
  std::size_t date_idx = header.size(), value_idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == map.date_column) date_idx = i;
    if (header[i] == map.value_column) value_idx = i;
  }
  if (date_idx == header.size()) {
    throw Error(Errc::missing_column, "no column `" + map.date_column + "`");
  }
  if (value_idx == header.size()) {
    throw Error(Errc::missing_column, "no column `" + map.value_column + "`");
  }
  std::vector<DatedValue> rows;
  for (std::size_t i = first + 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto cells = csv::split_line(lines[i]);
    if (cells.size() != header.size()) {
      throw Error(Errc::malformed_document, "row " + std::to_string(i + 1) + " has " +
                                                std::to_string(cells.size()) + " cells, expected " +
                                                std::to_string(header.size()));
    }
    const auto date = parse_date(cells[date_idx], map.date_format);
    if (!date) throw Error(Errc::unparsable_date, "bad date `" + cells[date_idx] + "`");
    double value;
    if (!csv::parse_number(cells[value_idx], value)) {
      throw Error(Errc::non_numeric_cell, "cell `" + cells[value_idx] + "`");
    }
    if (value < 0.0) {
      throw Error(Errc::negative_count, "negative count on " + format_date(*date));
    }
    rows.push_back({*date, value});
  }
  if (rows.empty()) throw Error(Errc::empty_input, "no data rows");
  return fill_missing(rows, policy, map.value_column);
}

namespace detail {

inline bool is_ascii_slug(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

}  // namespace detail

// Keyword-group manifest, JSON:
//   {"entries":[{"id":...,"display_name":...,"language":...,"variants":[...]}]}
inline SymptomManifest parse_manifest(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_document, e.what());
  }
  if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array()) {
    throw Error(Errc::malformed_document, "expected top-level object with `entries` array");
  }
  SymptomManifest manifest;
  std::unordered_set<std::string> seen_ids;
  for (const auto& item : doc["entries"]) {
    if (!item.is_object() || !item.contains("id") || !item["id"].is_string() ||
        !item.contains("variants") || !item["variants"].is_array()) {
      throw Error(Errc::malformed_document, "entry needs string `id` and array `variants`");
    }
    ManifestEntry entry;
    entry.id = item["id"].get<std::string>();
    if (!detail::is_ascii_slug(entry.id)) {
      throw Error(Errc::malformed_document, "id `" + entry.id + "` is not an ascii slug");
    }
    if (!seen_ids.insert(entry.id).second) {
      throw Error(Errc::duplicate_id, "id `" + entry.id + "` appears twice");
    }
    entry.display_name = item.value("display_name", entry.id);
    entry.language = item.value("language", std::string{});
    std::unordered_set<std::string> seen_variants;
    for (const auto& v : item["variants"]) {
      if (!v.is_string()) throw Error(Errc::malformed_document, "variant must be a string");
      auto text = v.get<std::string>();
      if (!seen_variants.insert(text).second) {
        throw Error(Errc::malformed_document,
                    "variant `" + text + "` repeated inside `" + entry.id + "`");
      }
      entry.variants.push_back(std::move(text));
    }
    if (entry.variants.empty()) {
      throw Error(Errc::empty_variants, "entry `" + entry.id + "` has no variants");
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

inline std::string manifest_to_json(const SymptomManifest& manifest) {
  nlohmann::ordered_json doc;
  doc["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : manifest.entries) {
    nlohmann::ordered_json item;
    item["id"] = e.id;
    item["display_name"] = e.display_name;
    item["language"] = e.language;
    item["variants"] = e.variants;
    doc["entries"].push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

// Writes the trend-export shape parse_trends_csv reads back. All series must
// share one date range; a non-empty geo gets the `: (<geo>)` suffix.
inline std::string trends_to_csv(const std::vector<DailySeries>& series,
                                 std::string_view geo = {}) {
  if (series.empty()) throw Error(Errc::empty_input, "nothing to write");
  for (const auto& s : series) {
    if (s.start != series[0].start || s.size() != series[0].size()) {
      throw Error(Errc::range_mismatch, "trend columns cover different ranges");
    }
  }
  std::string out = "Category: All categories\n\nDay";
  for (const auto& s : series) {
    out += ',';
    std::string label = s.label;
    if (!geo.empty()) label += ": (" + std::string(geo) + ")";
    out += csv::escape(label);
  }
  out += '\n';
  for (std::size_t i = 0; i < series[0].size(); ++i) {
    out += format_date(series[0].date_at(i));
    for (const auto& s : series) {
      out += ',';
      out += csv::format_value(s.values[i]);
    }
    out += '\n';
  }
  return out;
}

inline std::string cases_to_csv(const DailySeries& cases, const CaseColumnMap& map = {}) {
  std::string out = csv::escape(map.date_column) + "," + csv::escape(map.value_column) + "\n";
  for (std::size_t i = 0; i < cases.size(); ++i) {
    out += format_date(cases.date_at(i));
    out += ',';
    out += csv::format_value(cases.values[i]);
    out += '\n';
  }
  return out;
}

}  // namespace trendsurv
