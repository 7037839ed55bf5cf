#pragma once

/** @file
 * Daily meteorological time series shared by every model: the record and
 * dataset containers, calendar helpers and gap-free window extraction.
 */

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace snowcast {

using Date = std::chrono::year_month_day;

inline std::chrono::sys_days to_sys_days(const Date& d) { return std::chrono::sys_days{d}; }

inline Date add_days(const Date& d, long long n) {
  return Date{to_sys_days(d) + std::chrono::days{n}};
}

inline long long days_between(const Date& from, const Date& to) {
  return (to_sys_days(to) - to_sys_days(from)).count();
}

/// Parse YYYY-MM-DD; nullopt unless the text is exactly a valid date.
inline std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto digits = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (text[i] < '0' || text[i] > '9') return std::nullopt;
      v = v * 10 + (text[i] - '0');
    }
    return v;
  };
  const auto y = digits(0, 4);
  const auto m = digits(5, 2);
  const auto d = digits(8, 2);
  if (!y || !m || !d) return std::nullopt;
  const Date date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                  std::chrono::day{static_cast<unsigned>(*d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

inline std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

/// Ordinal day of the calendar year, 1..366. Drives the seasonal Fourier terms.
struct SeasonDay {
  int value = 1;
  friend bool operator==(SeasonDay, SeasonDay) = default;
};

inline SeasonDay season_day(const Date& d) {
  using namespace std::chrono;
  const sys_days jan1{d.year() / January / 1};
  return SeasonDay{static_cast<int>((sys_days{d} - jan1).count()) + 1};
}

inline int month_of(const Date& d) { return static_cast<int>(static_cast<unsigned>(d.month())); }

struct DailyRecord {
  Date date{};
  std::optional<double> temperature;    ///< daily mean, deg C
  std::optional<double> precipitation;  ///< last 24 h, mm
  std::optional<double> snow_depth;     ///< cm
};

/// Bit set naming record fields; used to request complete windows.
enum Field : unsigned {
  kTemperature = 1u,
  kPrecipitation = 2u,
  kSnowDepth = 4u,
};
using FieldSet = unsigned;

inline bool has_fields(const DailyRecord& r, FieldSet fields) {
  if ((fields & kTemperature) && !r.temperature) return false;
  if ((fields & kPrecipitation) && !r.precipitation) return false;
  if ((fields & kSnowDepth) && !r.snow_depth) return false;
  return true;
}

/// Half-open index range [first, last).
struct IndexRange {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t size() const { return last - first; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/**
 * Consecutive daily records. Dates are strictly increasing and exactly one
 * day apart; gaps in the source data are represented by records whose
 * fields are all missing. Immutable once built.
 */
class Dataset {
 public:
  Dataset() = default;

  explicit Dataset(std::vector<DailyRecord> records, std::string station_label = {})
      : records_(std::move(records)), station_label_(std::move(station_label)) {
    for (std::size_t i = 0; i < records_.size(); ++i) {
      const auto& r = records_[i];
      if (!r.date.ok()) throw std::invalid_argument("invalid date at index " + std::to_string(i));
      if (r.precipitation && !(*r.precipitation >= 0.0))
        throw std::invalid_argument("negative precipitation at index " + std::to_string(i));
      if (r.snow_depth && !(*r.snow_depth >= 0.0))
        throw std::invalid_argument("negative snow depth at index " + std::to_string(i));
      if (i > 0 && days_between(records_[i - 1].date, r.date) != 1)
        throw std::invalid_argument("dates not consecutive at index " + std::to_string(i));
    }
  }

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const DailyRecord& operator[](std::size_t i) const { return records_[i]; }
  auto begin() const { return records_.begin(); }
  auto end() const { return records_.end(); }
  const std::vector<DailyRecord>& records() const { return records_; }
  const std::string& station_label() const { return station_label_; }

  /// Index of `date`, if inside the series.
  std::optional<std::size_t> index_of(const Date& date) const {
    if (records_.empty()) return std::nullopt;
    const long long k = days_between(records_.front().date, date);
    if (k < 0 || k >= static_cast<long long>(records_.size())) return std::nullopt;
    return static_cast<std::size_t>(k);
  }

 private:
  std::vector<DailyRecord> records_;
  std::string station_label_;
};

/**
 * Maximal runs of records in which every field of `required` is present.
 * Likelihoods with lag order L use a run by skipping its first L days;
 * runs shorter than that contribute nothing but are still reported.
 */
inline std::vector<IndexRange> contiguous_windows(const Dataset& data, FieldSet required,
                                                  int min_lag = 0) {
  if (min_lag < 0) throw std::invalid_argument("contiguous_windows: negative lag");
  std::vector<IndexRange> out;
  std::size_t i = 0;
  while (i < data.size()) {
    if (!has_fields(data[i], required)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < data.size() && has_fields(data[j], required)) ++j;
    out.push_back({i, j});
    i = j;
  }
  return out;
}

}  // namespace snowcast
