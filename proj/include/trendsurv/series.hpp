#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "trendsurv/date.hpp"
#include "trendsurv/error.hpp"

namespace trendsurv {

// One value per consecutive calendar day starting at `start`.
struct DailySeries {
  Date start{};
  std::vector<double> values;
  std::string label;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  Date date_at(std::size_t i) const { return start + std::chrono::days(long(i)); }
  // Last covered day (inclusive). Series must be non-empty.
  Date last() const { return start + std::chrono::days(long(values.size()) - 1); }
};

enum class WeeklyMode { sum, mean };

inline const char* weekly_mode_name(WeeklyMode m) {
  return m == WeeklyMode::sum ? "sum" : "mean";
}

// One value per complete 7-day block; partial trailing blocks never appear.
struct WeeklySeries {
  Date start{};
  std::vector<double> values;
  WeeklyMode mode = WeeklyMode::sum;
  std::string label;

  std::size_t size() const { return values.size(); }
};

// Two equal-length value sequences over a shared date range, n >= 3.
struct AlignedPair {
  Date start{};
  std::vector<double> x;
  std::vector<double> y;

  std::size_t n() const { return x.size(); }
};

struct DatedValue {
  Date date;
  double value;
};

enum class MissingPolicy { error, zero, linear };

inline const char* missing_policy_name(MissingPolicy p) {
  switch (p) {
    case MissingPolicy::error: return "error";
    case MissingPolicy::zero: return "zero";
    case MissingPolicy::linear: return "linear";
  }
  return "?";
}

// Builds a contiguous daily series over [first date, last date]. Input dates
// must be strictly increasing; gaps are handled per policy.
inline DailySeries fill_missing(const std::vector<DatedValue>& raw, MissingPolicy policy,
                                std::string label = {}) {
  if (raw.empty()) throw Error(Errc::empty_input, "no dated values");
  for (std::size_t i = 1; i < raw.size(); ++i) {
    if (raw[i].date == raw[i - 1].date) {
      throw Error(Errc::duplicate_date, "duplicate date " + format_date(raw[i].date));
    }
    if (raw[i].date < raw[i - 1].date) {
      throw Error(Errc::unsorted_dates, "dates not increasing at " + format_date(raw[i].date));
    }
  }
  DailySeries out;
  out.start = raw.front().date;
  out.label = std::move(label);
  const long span = days_between(raw.front().date, raw.back().date) + 1;
  out.values.reserve(std::size_t(span));
  for (std::size_t i = 0; i + 1 < raw.size(); ++i) {
    out.values.push_back(raw[i].value);
    const long gap = days_between(raw[i].date, raw[i + 1].date) - 1;
    if (gap == 0) continue;
    switch (policy) {
      case MissingPolicy::error:
        throw Error(Errc::gap_found, std::to_string(gap) + " missing day(s) after " +
                                         format_date(raw[i].date));
      case MissingPolicy::zero:
        out.values.insert(out.values.end(), std::size_t(gap), 0.0);
        break;
      case MissingPolicy::linear: {
        const double lo = raw[i].value;
        const double hi = raw[i + 1].value;
        for (long k = 1; k <= gap; ++k) {
          out.values.push_back(lo + (hi - lo) * double(k) / double(gap + 1));
        }
        break;
      }
    }
  }
  out.values.push_back(raw.back().value);
  return out;
}

// Restricts both series to the intersection of their date ranges.
inline AlignedPair align_pair(const DailySeries& a, const DailySeries& b) {
  if (a.empty() || b.empty()) throw Error(Errc::empty_input, "empty series");
  const Date lo = std::max(a.start, b.start);
  const Date hi = std::min(a.last(), b.last());
  if (lo > hi) {
    throw Error(Errc::disjoint_ranges,
                a.label + " and " + b.label + " share no dates");
  }
  const long n = days_between(lo, hi) + 1;
  if (n < 3) throw Error(Errc::too_short, "overlap of " + std::to_string(n) + " day(s)");
  AlignedPair pair;
  pair.start = lo;
  const auto off_a = std::size_t(days_between(a.start, lo));
  const auto off_b = std::size_t(days_between(b.start, lo));
  pair.x.assign(a.values.begin() + long(off_a), a.values.begin() + long(off_a) + n);
  pair.y.assign(b.values.begin() + long(off_b), b.values.begin() + long(off_b) + n);
  return pair;
}

// Sub-series covering exactly [start, end]; the input must cover it fully.
inline DailySeries clip(const DailySeries& s, Date start, Date end) {
  if (s.empty()) throw Error(Errc::empty_input, "empty series");
  if (start > end) throw Error(Errc::bad_argument, "period start after end");
  if (s.start > end || s.last() < start) {
    throw Error(Errc::disjoint_ranges, s.label + " does not intersect the period");
  }
  if (s.start > start || s.last() < end) {
    throw Error(Errc::too_short, s.label + " covers " + format_date(s.start) + ".." +
                                     format_date(s.last()) + ", period needs " +
                                     format_date(start) + ".." + format_date(end));
  }
  DailySeries out;
  out.start = start;
  out.label = s.label;
  const auto off = std::size_t(days_between(s.start, start));
  const auto len = std::size_t(days_between(start, end) + 1);
  out.values.assign(s.values.begin() + long(off), s.values.begin() + long(off + len));
  return out;
}

// Consecutive 7-day blocks anchored at the series start; trailing partial
// blocks are dropped so every output value covers exactly 7 days.
inline WeeklySeries resample_weekly(const DailySeries& s, WeeklyMode mode) {
  const std::size_t blocks = s.size() / 7;
  if (blocks == 0) {
    throw Error(Errc::too_short, "need at least 7 days, got " + std::to_string(s.size()));
  }
  WeeklySeries out;
  out.start = s.start;
  out.mode = mode;
  out.label = s.label;
  out.values.reserve(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < 7; ++k) acc += s.values[b * 7 + k];
    out.values.push_back(mode == WeeklyMode::sum ? acc : acc / 7.0);
  }
  return out;
}

}  // namespace trendsurv
