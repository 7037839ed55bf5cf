#pragma once

// CSV ingestion and export for daily series.
//
//   date,temp_c,precip_mm,snow_cm
//   2001-01-01,-3.5,0,42
//
// Empty fields are missing values. LF and CRLF line endings are accepted.

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "snowcast/dataset.hpp"

namespace snowcast {

/// Ingestion error carrying the 1-based line number of the offending row.
class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t row, const std::string& what)
      : std::runtime_error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

inline constexpr std::string_view kCsvHeader = "date,temp_c,precip_mm,snow_cm";

/// Shortest text that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_value(std::string_view field, std::size_t row,
                                         const char* name) {
  field = trim(field);
  if (field.empty()) return std::nullopt;
  if (field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size() || !std::isfinite(v))
    throw CsvError(row, std::string("non-numeric ") + name + " '" + std::string(field) + "'");
  return v;
}

}  // namespace detail

/// Parse a dataset; gaps between consecutive dates become all-missing records.
/// Lines starting with '#' are comments.
inline Dataset read_csv(std::istream& in, std::string station_label = {}) {
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  std::vector<DailyRecord> records;
  while (std::getline(in, line)) {
    ++row;
    const std::string_view view = detail::trim(line);
    if (view.empty() || view.front() == '#') continue;
    if (!header_seen) {
      if (view != kCsvHeader) throw CsvError(row, "expected header '" + std::string(kCsvHeader) + "'");
      header_seen = true;
      continue;
    }
    const auto fields = detail::split_fields(view);
    if (fields.size() != 4) throw CsvError(row, "expected 4 fields, got " + std::to_string(fields.size()));
    const auto date = parse_date(detail::trim(fields[0]));
    if (!date) throw CsvError(row, "malformed date '" + std::string(fields[0]) + "'");
    DailyRecord rec;
    rec.date = *date;
    rec.temperature = detail::parse_value(fields[1], row, "temperature");
    rec.precipitation = detail::parse_value(fields[2], row, "precipitation");
    rec.snow_depth = detail::parse_value(fields[3], row, "snow depth");
    if (rec.precipitation && *rec.precipitation < 0.0) throw CsvError(row, "negative precipitation");
    if (rec.snow_depth && *rec.snow_depth < 0.0) throw CsvError(row, "negative snow depth");
    if (!records.empty()) {
      const long long step = days_between(records.back().date, rec.date);
      if (step < 1) throw CsvError(row, "date not after previous row");
      for (long long k = 1; k < step; ++k) records.push_back({add_days(records.back().date, 1), {}, {}, {}});
    }
    records.push_back(rec);
  }
  // A file with no rows at all (not even a header) is an empty dataset.
  return Dataset(std::move(records), std::move(station_label));
}

inline Dataset load_csv(const std::string& path, std::string station_label = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_csv(in, station_label.empty() ? path : std::move(station_label));
}

inline void write_csv(std::ostream& out, const Dataset& data) {
  auto field = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; };
  out << kCsvHeader << '\n';
  for (const auto& r : data) {
    out << format_date(r.date) << ',' << field(r.temperature) << ',' << field(r.precipitation) << ','
        << field(r.snow_depth) << '\n';
  }
}

inline void save_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_csv(out, data);
}

}  // namespace snowcast
