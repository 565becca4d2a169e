#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trendsurv/ingest.hpp"
#include "trendsurv/stats.hpp"

namespace trendsurv {

enum class CaseCurve { unimodal_peak, bimodal, flat };

inline const char* case_curve_name(CaseCurve c) {
  switch (c) {
    case CaseCurve::unimodal_peak: return "unimodal-peak";
    case CaseCurve::bimodal: return "bimodal";
    case CaseCurve::flat: return "flat";
  }
  return "?";
}

// Additive distortion of the trend side, mimicking a news-driven search spike.
struct MediaBurst {
  int start = 0;     // day offset into the generated window
  int duration = 0;  // days
  double amplitude = 0.0;
};

struct SynthSpec {
  int n_days = 244;
  double target_spearman = 0.7;
  int lag_days = 0;  // positive: the trend series leads the cases
  CaseCurve case_curve = CaseCurve::unimodal_peak;
  double noise_scale = 0.0;  // sd of additive case noise, in case units
  std::optional<MediaBurst> media_burst;
  std::uint64_t seed = kDefaultSeed;
  Date start = make_date(2020, 3, 2);
  double peak_cases = 5000.0;
};

namespace detail {

// Acklam's rational approximation to the standard normal quantile,
// |relative error| < 1.2e-9. Pure arithmetic, so bit-stable across libms.
inline double normal_quantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double low = 0.02425;
  if (p <= 0.0 || p >= 1.0) throw Error(Errc::bad_argument, "quantile needs p in (0,1)");
  if (p < low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

inline double curve_value(CaseCurve curve, double t, double n, double peak) {
  const auto bump = [](double t0, double width, double at) {
    const double z = (at - t0) / width;
    return std::exp(-0.5 * z * z);
  };
  switch (curve) {
    case CaseCurve::unimodal_peak:
      return peak * bump(n / 2.0, n / 8.0, t);
    case CaseCurve::bimodal:
      return peak * (bump(n / 3.0, n / 12.0, t) + 0.6 * bump(2.0 * n / 3.0, n / 12.0, t));
    case CaseCurve::flat:
      return peak * 0.5;
  }
  return 0.0;
}

// Van der Waerden normal scores of the midranks: a strictly rank-monotone
// normal-marginal transform, tied values sharing one score.
inline std::vector<double> normal_scores(const std::vector<double>& values) {
  auto ranks = midranks(values);
  const double denom = double(values.size()) + 1.0;
  for (auto& r : ranks) r = normal_quantile(r / denom);
  return ranks;
}

// Equal-spaced rank rescale onto [0, 100]; monotone, so Spearman-neutral.
inline std::vector<double> rank_rescale(const std::vector<double>& values) {
  auto ranks = midranks(values);
  const double n = double(values.size());
  for (auto& r : ranks) r = 100.0 * (r - 1.0) / (n - 1.0);
  return ranks;
}

inline void validate(const SynthSpec& spec) {
  if (spec.n_days < 14) throw Error(Errc::bad_argument, "n_days must be >= 14");
  if (std::fabs(spec.target_spearman) > 1.0) {
    throw Error(Errc::bad_argument, "target Spearman must lie in [-1, 1]");
  }
  if (spec.noise_scale < 0.0) throw Error(Errc::bad_argument, "noise_scale must be >= 0");
  if (spec.peak_cases <= 0.0) throw Error(Errc::bad_argument, "peak_cases must be > 0");
  if (spec.media_burst && spec.media_burst->duration < 0) {
    throw Error(Errc::bad_argument, "burst duration must be >= 0");
  }
}

// Core coupling: given the extended case latent's normal scores and a child
// generator, produce the trend side at Pearson rho = 2 sin(pi * rho_s / 6)
// on the latent scale (the normal-copula inverse of the target Spearman).
inline std::vector<double> coupled_trend(const std::vector<double>& scores, std::size_t offset,
                                         std::size_t n, double target_spearman, Rng& rng,
                                         const std::optional<MediaBurst>& burst,
                                         bool discretize) {
  // Snap |target| = 1 to an exact unit rho: the sine relation only reaches
  // +-1 up to rounding, and any leftover mix noise would re-break ties.
  const double rho = std::fabs(target_spearman) == 1.0
                         ? target_spearman
                         : 2.0 * std::sin(3.14159265358979323846 * target_spearman / 6.0);
  const double mix = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  std::vector<double> latent(n);
  for (std::size_t i = 0; i < n; ++i) {
    latent[i] = rho * scores[offset + i] + mix * rng.next_normal();
  }
  auto trend = rank_rescale(latent);
  if (burst) {
    const long lo = burst->start;
    const long hi = burst->start + burst->duration;
    for (long t = std::max(lo, 0L); t < std::min(hi, long(n)); ++t) {
      trend[std::size_t(t)] = std::min(100.0, std::max(0.0, trend[std::size_t(t)] + burst->amplitude));
    }
  }
  if (discretize) {
    for (auto& v : trend) v = std::round(v);
  }
  return trend;
}

}  // namespace detail

// A (trend, cases) pair whose sample Spearman correlation tracks the target.
// The case side follows the configured epidemic curve plus noise; the trend
// side is coupled to the case ranks through a Gaussian copula and shifted so
// it leads the cases by lag_days. Deterministic for a given seed.
//
// At |target| = 1 with zero noise the trend side stays real-valued: rounding
// to integers would collapse distinct ranks and break the exact comonotone
// guarantee. Every other configuration is discretized like a real export.
inline std::pair<DailySeries, DailySeries> generate_pair(const SynthSpec& spec) {
  detail::validate(spec);
  const std::size_t n = std::size_t(spec.n_days);
  const std::size_t y_off = std::size_t(spec.lag_days < 0 ? -spec.lag_days : 0);
  const std::size_t x_off = std::size_t(long(y_off) + spec.lag_days);
  const std::size_t m = n + std::size_t(std::abs(spec.lag_days));

  Rng case_rng = Rng::for_stream(spec.seed, 0);
  std::vector<double> cases_ext(m);
  for (std::size_t p = 0; p < m; ++p) {
    const double t = double(p) - double(y_off);
    const double raw = detail::curve_value(spec.case_curve, t, double(n), spec.peak_cases) +
                       spec.noise_scale * case_rng.next_normal();
    cases_ext[p] = std::max(0.0, std::round(raw));
  }
  const auto scores = detail::normal_scores(cases_ext);

  Rng trend_rng = Rng::for_stream(spec.seed, 1);
  const bool exact = std::fabs(spec.target_spearman) == 1.0 && spec.noise_scale == 0.0;
  auto trend_values = detail::coupled_trend(scores, x_off, n, spec.target_spearman, trend_rng,
                                            spec.media_burst, !exact);

  DailySeries trend{spec.start, std::move(trend_values), "rsv"};
  DailySeries cases{spec.start,
                    std::vector<double>(cases_ext.begin() + long(y_off),
                                        cases_ext.begin() + long(y_off + n)),
                    "cases"};
  return {std::move(trend), std::move(cases)};
}

struct FixtureSymptom {
  std::string id;
  double target_spearman = 0.5;
  int lag_days = 0;
  int n_variants = 1;
};

struct FixtureOptions {
  Date start = make_date(2020, 3, 2);
  int n_days = 244;
  CaseCurve case_curve = CaseCurve::unimodal_peak;
  double noise_scale = 0.0;
  double peak_cases = 5000.0;
  std::string geo;  // optional `: (<geo>)` suffix on trend headers
};

// A full study's worth of parse-compatible files, in memory.
struct StudyFixture {
  SymptomManifest manifest;
  std::string manifest_json;
  std::vector<std::pair<std::string, std::string>> trend_files;  // filename -> bytes
  std::string cases_csv;
  DailySeries cases;
};

namespace detail {

inline std::vector<std::string> variant_queries(const std::string& id, int count) {
  static const char* kSuffixes[] = {"symptoms", "treatment", "causes",
                                    "remedy",   "signs",     "relief"};
  std::vector<std::string> out;
  out.push_back(id);
  for (int k = 1; k < count; ++k) {
    const auto idx = std::size_t(k - 1);
    if (idx < std::size(kSuffixes)) {
      out.push_back(id + " " + kSuffixes[idx]);
    } else {
      out.push_back(id + " v" + std::to_string(k));
    }
  }
  return out;
}

inline std::string display_name_for(const std::string& id) {
  std::string name = id;
  for (auto& c : name) {
    if (c == '_' || c == '-') c = ' ';
  }
  if (!name.empty() && name[0] >= 'a' && name[0] <= 'z') name[0] = char(name[0] - 'a' + 'A');
  return name;
}

// Integer split of one signal across k variant columns, sums preserved
// exactly. Non-integer signals split into k equal shares instead; either way
// the variant sum is a strictly monotone image of the signal.
inline std::vector<std::vector<double>> split_variants(const std::vector<double>& signal,
                                                       int k) {
  std::vector<std::vector<double>> parts(std::size_t(k),
                                         std::vector<double>(signal.size(), 0.0));
  for (std::size_t i = 0; i < signal.size(); ++i) {
    const double v = signal[i];
    if (v == std::floor(v)) {
      const long whole = long(v);
      const long base = whole / k;
      const long extra = whole % k;
      for (long j = 0; j < k; ++j) parts[std::size_t(j)][i] = double(base + (j < extra ? 1 : 0));
    } else {
      for (long j = 0; j < k; ++j) parts[std::size_t(j)][i] = v / double(k);
    }
  }
  return parts;
}

}  // namespace detail

// One shared case curve plus, per symptom, a trend signal embedding the
// requested Spearman target and lead, written in the exact file shapes the
// ingest parsers read. Bit-identical output for identical inputs and seed.
inline StudyFixture generate_study_fixture(const std::vector<FixtureSymptom>& symptoms,
                                           std::uint64_t seed,
                                           const FixtureOptions& options = {}) {
  if (symptoms.empty()) throw Error(Errc::empty_input, "no symptoms requested");
  if (options.n_days < 14) throw Error(Errc::bad_argument, "n_days must be >= 14");
  int lag_lo = 0, lag_hi = 0;
  for (const auto& s : symptoms) {
    if (std::fabs(s.target_spearman) > 1.0) {
      throw Error(Errc::bad_argument, "target Spearman must lie in [-1, 1]");
    }
    if (s.n_variants < 1) throw Error(Errc::bad_argument, "n_variants must be >= 1");
    lag_lo = std::min(lag_lo, s.lag_days);
    lag_hi = std::max(lag_hi, s.lag_days);
  }

  const std::size_t n = std::size_t(options.n_days);
  const std::size_t y_off = std::size_t(-lag_lo);
  const std::size_t m = n + y_off + std::size_t(lag_hi);

  Rng case_rng = Rng::for_stream(seed, 0);
  std::vector<double> cases_ext(m);
  for (std::size_t p = 0; p < m; ++p) {
    const double t = double(p) - double(y_off);
    const double raw =
        detail::curve_value(options.case_curve, t, double(n), options.peak_cases) +
        options.noise_scale * case_rng.next_normal();
    cases_ext[p] = std::max(0.0, std::round(raw));
  }
  const auto scores = detail::normal_scores(cases_ext);

  StudyFixture fixture;
  fixture.cases = DailySeries{options.start,
                              std::vector<double>(cases_ext.begin() + long(y_off),
                                                  cases_ext.begin() + long(y_off + n)),
                              "cases"};
  fixture.cases_csv = cases_to_csv(fixture.cases, CaseColumnMap{"date", "cases"});

  std::uint64_t stream = 1;
  for (const auto& sym : symptoms) {
    Rng trend_rng = Rng::for_stream(seed, stream++);
    const bool exact =
        std::fabs(sym.target_spearman) == 1.0 && options.noise_scale == 0.0;
    const std::size_t offset = std::size_t(long(y_off) + long(sym.lag_days));
    auto signal = detail::coupled_trend(scores, offset, n, sym.target_spearman, trend_rng,
                                        std::nullopt, !exact);

    const auto parts = detail::split_variants(signal, sym.n_variants);
    const auto queries = detail::variant_queries(sym.id, sym.n_variants);
    std::vector<DailySeries> columns;
    for (std::size_t q = 0; q < queries.size(); ++q) {
      columns.push_back(DailySeries{options.start, parts[q], queries[q]});
    }
    fixture.trend_files.emplace_back("trends_" + sym.id + ".csv",
                                     trends_to_csv(columns, options.geo));

    ManifestEntry entry;
    entry.id = sym.id;
    entry.display_name = detail::display_name_for(sym.id);
    entry.language = "en";
    entry.variants = queries;
    fixture.manifest.entries.push_back(std::move(entry));
  }
  fixture.manifest_json = manifest_to_json(fixture.manifest);
  return fixture;
}

}  // namespace trendsurv
