#pragma once

#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "trendsurv/ingest.hpp"
#include "trendsurv/stats.hpp"

namespace trendsurv {

// Element-wise sum of a symptom's variant series.
struct SymptomSignal {
  std::string symptom_id;
  DailySeries daily;
  double total_rsv = 0.0;
};

inline SymptomSignal aggregate_symptom(const std::vector<DailySeries>& variants,
                                       std::string symptom_id) {
  if (variants.empty()) throw Error(Errc::empty_input, "no variant series");
  for (const auto& v : variants) {
    if (v.start != variants[0].start || v.size() != variants[0].size()) {
      throw Error(Errc::range_mismatch, "variant `" + v.label + "` covers a different range");
    }
  }
  SymptomSignal signal;
  signal.symptom_id = symptom_id;
  signal.daily.start = variants[0].start;
  signal.daily.label = symptom_id;
  signal.daily.values.assign(variants[0].size(), 0.0);
  for (const auto& v : variants) {
    for (std::size_t i = 0; i < v.size(); ++i) signal.daily.values[i] += v.values[i];
  }
  signal.total_rsv =
      std::accumulate(signal.daily.values.begin(), signal.daily.values.end(), 0.0);
  return signal;
}

inline SymptomSignal composite_all_symptoms(const std::vector<SymptomSignal>& signals) {
  if (signals.empty()) throw Error(Errc::empty_input, "no signals");
  std::vector<DailySeries> parts;
  parts.reserve(signals.size());
  for (const auto& s : signals) parts.push_back(s.daily);
  return aggregate_symptom(parts, "all_symptoms");
}

enum class Significance { not_significant, weak, moderate, high };

inline const char* significance_name(Significance s) {
  switch (s) {
    case Significance::not_significant: return "not_significant";
    case Significance::weak: return "weak";
    case Significance::moderate: return "moderate";
    case Significance::high: return "high";
  }
  return "?";
}

struct Thresholds {
  double high = 0.5;
  double moderate = 0.3;
  double alpha = 0.05;
};

// p >= alpha kills significance outright; otherwise band by |r|.
inline Significance classify(double r, double p, const Thresholds& t = {}) {
  if (p >= t.alpha) return Significance::not_significant;
  const double a = std::abs(r);
  if (a > t.high) return Significance::high;
  if (a >= t.moderate) return Significance::moderate;
  return Significance::weak;
}

struct StudyConfig {
  Date period_start = make_date(2020, 3, 2);
  Date period_end = make_date(2020, 10, 31);
  PMethod p_method = PMethod::t_approx;
  WeeklyMode weekly_rsv = WeeklyMode::mean;  // weekly cases are always summed
  Thresholds thresholds;
  int max_lag = 0;  // > 0: report the daily correlation at the best scanned lag
  int min_overlap = 10;
  long mc_iterations = 100000;
  std::uint64_t seed = kDefaultSeed;
};

// One correlation slot of a study row; `error` is set instead of `result`
// when the computation degenerated for this symptom.
struct RowResult {
  std::optional<CorrelationResult> result;
  std::optional<Significance> cls;
  std::string error;
};

struct StudyRow {
  std::string symptom_id;
  std::string display_name;
  RowResult daily;
  RowResult weekly;
  double total_rsv = 0.0;
};

struct StudyReport {
  std::vector<StudyRow> rows;  // manifest order, all_symptoms last
  int n_daily = 0;
  int n_weekly = 0;
  StudyConfig config;
};

struct MonthTotal {
  int year = 0;
  unsigned month = 0;
  double total = 0.0;
};

struct CaseSummary {
  Date peak_date{};
  double peak_value = 0.0;
  std::vector<MonthTotal> monthly;  // chronological
};

// Peak (earliest date on ties) and calendar-month totals.
inline CaseSummary summarize_cases(const DailySeries& cases) {
  if (cases.empty()) throw Error(Errc::empty_input, "empty series");
  CaseSummary summary;
  std::size_t peak_idx = 0;
  for (std::size_t i = 1; i < cases.size(); ++i) {
    if (cases.values[i] > cases.values[peak_idx]) peak_idx = i;
  }
  summary.peak_date = cases.date_at(peak_idx);
  summary.peak_value = cases.values[peak_idx];
  std::map<std::pair<int, unsigned>, double> totals;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto ymd = to_ymd(cases.date_at(i));
    totals[{int(ymd.year()), unsigned(ymd.month())}] += cases.values[i];
  }
  for (const auto& [key, total] : totals) {
    summary.monthly.push_back({key.first, key.second, total});
  }
  return summary;
}

namespace detail {

// Per-row MC seed: decorrelated from the run seed but fixed by row position,
// so parallel and sequential evaluation agree byte for byte.
inline std::uint64_t row_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 1));
}

inline RowResult correlate_row(const AlignedPair& pair, PMethod method,
                               const PValueOptions& opts, const Thresholds& thresholds) {
  RowResult slot;
  try {
    slot.result = correlate(pair, method, opts);
    slot.cls = classify(slot.result->rho, slot.result->p_value, thresholds);
  } catch (const Error& e) {
    slot.error = e.what();
  }
  return slot;
}

inline StudyRow study_row(const SymptomSignal& signal, const DailySeries& cases,
                          const StudyConfig& config, std::uint64_t stream,
                          std::string display_name) {
  StudyRow row;
  row.symptom_id = signal.symptom_id;
  row.display_name = std::move(display_name);
  row.total_rsv = signal.total_rsv;

  PValueOptions opts;
  opts.mc_iterations = config.mc_iterations;
  opts.seed = row_seed(config.seed, stream);

  AlignedPair daily;
  daily.start = config.period_start;
  daily.x = signal.daily.values;
  daily.y = cases.values;

  if (config.max_lag > 0) {
    try {
      const auto scan = lag_scan(signal.daily, cases, config.max_lag, config.min_overlap,
                                 config.p_method, opts);
      for (const auto& entry : scan.entries) {
        if (entry.lag_days == scan.best_lag && entry.result) {
          row.daily.result = entry.result;
          row.daily.cls =
              classify(entry.result->rho, entry.result->p_value, config.thresholds);
          break;
        }
      }
    } catch (const Error& e) {
      row.daily.error = e.what();
    }
  } else {
    row.daily = correlate_row(daily, config.p_method, opts, config.thresholds);
  }

  try {
    const auto weekly_signal = resample_weekly(signal.daily, config.weekly_rsv);
    const auto weekly_cases = resample_weekly(cases, WeeklyMode::sum);
    AlignedPair weekly;
    weekly.start = weekly_signal.start;
    weekly.x = weekly_signal.values;
    weekly.y = weekly_cases.values;
    opts.seed = row_seed(config.seed, stream ^ 0x8000000000000000ULL);
    row.weekly = correlate_row(weekly, config.p_method, opts, config.thresholds);
  } catch (const Error& e) {
    row.weekly.error = e.what();
  }
  return row;
}

}  // namespace detail

// The whole pipeline: per manifest entry, aggregate its variant series,
// correlate daily and weekly against the case series over the configured
// period, classify, and append the all-symptoms composite row. Deterministic
// for a given config.
inline StudyReport run_study(const SymptomManifest& manifest,
                             const std::vector<DailySeries>& variant_series,
                             const DailySeries& cases, const StudyConfig& config) {
  if (manifest.entries.empty()) throw Error(Errc::empty_input, "manifest has no entries");
  if (config.period_start >= config.period_end) {
    throw Error(Errc::bad_argument, "period start must precede end");
  }
  std::map<std::string, const DailySeries*> by_label;
  for (const auto& s : variant_series) {
    if (!by_label.emplace(s.label, &s).second) {
      throw Error(Errc::malformed_document, "two series share the label `" + s.label + "`");
    }
  }
  const DailySeries cases_clipped = clip(cases, config.period_start, config.period_end);

  StudyReport report;
  report.config = config;
  report.n_daily = int(cases_clipped.size());
  report.n_weekly = int(cases_clipped.size() / 7);

  std::vector<SymptomSignal> signals;
  std::uint64_t stream = 0;
  for (const auto& entry : manifest.entries) {
    StudyRow row;
    row.symptom_id = entry.id;
    row.display_name = entry.display_name;
    try {
      std::vector<DailySeries> variants;
      for (const auto& query : entry.variants) {
        const auto it = by_label.find(query);
        if (it == by_label.end()) {
          throw Error(Errc::missing_variant, "no series for query `" + query + "`");
        }
        variants.push_back(clip(*it->second, config.period_start, config.period_end));
      }
      const auto signal = aggregate_symptom(variants, entry.id);
      signals.push_back(signal);
      row = detail::study_row(signal, cases_clipped, config, stream, entry.display_name);
    } catch (const Error& e) {
      row.daily.error = std::string("[") + entry.id + "] " + e.what();
      row.weekly.error = row.daily.error;
    }
    report.rows.push_back(std::move(row));
    ++stream;
  }

  StudyRow all_row;
  all_row.symptom_id = "all_symptoms";
  all_row.display_name = "All Symptoms";
  if (!signals.empty()) {
    const auto composite = composite_all_symptoms(signals);
    all_row = detail::study_row(composite, cases_clipped, config, stream, "All Symptoms");
  } else {
    all_row.daily.error = "no symptom signal could be built";
    all_row.weekly.error = all_row.daily.error;
  }
  report.rows.push_back(std::move(all_row));
  return report;
}

}  // namespace trendsurv
