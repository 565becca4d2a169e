#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trendsurv/rng.hpp"
#include "trendsurv/series.hpp"
#include "trendsurv/tdist.hpp"

namespace trendsurv {

enum class PMethod { t_approx, exact_perm, mc_perm };

inline const char* p_method_name(PMethod m) {
  switch (m) {
    case PMethod::t_approx: return "t_approx";
    case PMethod::exact_perm: return "exact_perm";
    case PMethod::mc_perm: return "mc_perm";
  }
  return "?";
}

struct CorrelationResult {
  double rho = 0.0;
  double p_value = 1.0;
  int n = 0;
  PMethod method = PMethod::t_approx;
  int lag_days = 0;
  // |rho| = 1 under the t-approximation: p reported as 0 rather than from a
  // division by zero.
  bool degenerate = false;
};

struct PValueOptions {
  long mc_iterations = 100000;
  std::uint64_t seed = kDefaultSeed;
};

// Ranks with tied values sharing the mean of their occupied positions.
// 1-based; ranks always sum to n(n+1)/2.
inline std::vector<double> midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = 0.5 * double(i + j) + 1.0;  // mean of positions i..j, 1-based
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

namespace detail {

struct CenteredRanks {
  std::vector<double> x;  // centered midranks
  std::vector<double> y;
  double norm_x = 0.0;  // sqrt of centered sum of squares
  double norm_y = 0.0;
};

inline CenteredRanks center_ranks(std::span<const double> xs, std::span<const double> ys) {
  CenteredRanks cr;
  cr.x = midranks(xs);
  cr.y = midranks(ys);
  const double n = double(cr.x.size());
  const double mean = (n + 1.0) / 2.0;  // midranks always average to (n+1)/2
  double ssx = 0.0, ssy = 0.0;
  for (auto& v : cr.x) {
    v -= mean;
    ssx += v * v;
  }
  for (auto& v : cr.y) {
    v -= mean;
    ssy += v * v;
  }
  cr.norm_x = std::sqrt(ssx);
  cr.norm_y = std::sqrt(ssy);
  return cr;
}

inline double rho_from_centered(const CenteredRanks& cr) {
  double cross = 0.0;
  for (std::size_t i = 0; i < cr.x.size(); ++i) cross += cr.x[i] * cr.y[i];
  const double rho = cross / (cr.norm_x * cr.norm_y);
  return std::clamp(rho, -1.0, 1.0);
}

}  // namespace detail

// Spearman rho: Pearson correlation of the two midrank vectors.
inline double spearman_rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(Errc::bad_argument, "length mismatch");
  if (x.size() < 3) throw Error(Errc::too_few_samples, "need n >= 3");
  const auto cr = detail::center_ranks(x, y);
  if (cr.norm_x == 0.0 || cr.norm_y == 0.0) {
    throw Error(Errc::zero_variance, cr.norm_x == 0.0 ? "x side is constant"
                                                      : "y side is constant");
  }
  return detail::rho_from_centered(cr);
}

inline double spearman_rho(const AlignedPair& pair) { return spearman_rho(pair.x, pair.y); }

// Two-sided p for t = rho * sqrt((n-2)/(1-rho^2)) against t_{n-2}.
// |rho| = 1 yields 0; callers flag that case as degenerate.
inline double p_value_t(double rho, int n) {
  if (n < 4) throw Error(Errc::too_few_samples, "t-approximation needs n >= 4");
  const double a = std::fabs(rho);
  if (a >= 1.0) return 0.0;
  const double t = rho * std::sqrt(double(n - 2) / ((1.0 - rho) * (1.0 + rho)));
  return student_t_two_sided(t, n - 2);
}

// Exact two-sided permutation p: the fraction of all n! re-pairings whose
// |rho| reaches the observed one. Enumerates distinct multiset permutations;
// with ties every distinct arrangement stands for the same number of raw
// permutations, so the fraction is unchanged.
inline double p_value_exact(const AlignedPair& pair) {
  const std::size_t n = pair.n();
  if (n > 9) throw Error(Errc::too_large, "exact enumeration capped at n = 9");
  auto cr = detail::center_ranks(pair.x, pair.y);
  if (cr.norm_x == 0.0 || cr.norm_y == 0.0) {
    throw Error(Errc::zero_variance, "constant side");
  }
  const double observed = std::fabs(detail::rho_from_centered(cr));
  const double denom = cr.norm_x * cr.norm_y;
  const double tol = 1e-12;

  std::vector<double> perm = cr.y;
  std::sort(perm.begin(), perm.end());
  std::uint64_t total = 0, hits = 0;
  do {
    double cross = 0.0;
    for (std::size_t i = 0; i < n; ++i) cross += cr.x[i] * perm[i];
    if (std::fabs(cross) / denom >= observed - tol) ++hits;
    ++total;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return double(hits) / double(total);
}

// Monte Carlo permutation p with the add-one estimator
// (1 + hits) / (iterations + 1); deterministic given the seed.
inline double p_value_mc(const AlignedPair& pair, long iterations, std::uint64_t seed) {
  if (iterations < 1000) throw Error(Errc::bad_argument, "need at least 1000 iterations");
  auto cr = detail::center_ranks(pair.x, pair.y);
  if (cr.norm_x == 0.0 || cr.norm_y == 0.0) {
    throw Error(Errc::zero_variance, "constant side");
  }
  const double observed = std::fabs(detail::rho_from_centered(cr));
  const double denom = cr.norm_x * cr.norm_y;
  const double tol = 1e-12;

  Rng rng(seed);
  std::vector<double> perm = cr.y;
  long hits = 0;
  for (long it = 0; it < iterations; ++it) {
    rng.shuffle(perm);
    double cross = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) cross += cr.x[i] * perm[i];
    if (std::fabs(cross) / denom >= observed - tol) ++hits;
  }
  return double(hits + 1) / double(iterations + 1);
}

// rho plus the p-value of the requested method, as one record.
inline CorrelationResult correlate(const AlignedPair& pair, PMethod method,
                                   const PValueOptions& opts = {}) {
  CorrelationResult r;
  r.rho = spearman_rho(pair);
  r.n = int(pair.n());
  r.method = method;
  switch (method) {
    case PMethod::t_approx:
      r.p_value = p_value_t(r.rho, r.n);
      r.degenerate = std::fabs(r.rho) >= 1.0;
      break;
    case PMethod::exact_perm:
      r.p_value = p_value_exact(pair);
      break;
    case PMethod::mc_perm:
      r.p_value = p_value_mc(pair, opts.mc_iterations, opts.seed);
      break;
  }
  return r;
}

struct LagEntry {
  int lag_days = 0;
  int overlap = 0;
  std::optional<CorrelationResult> result;  // absent when degenerate at this lag
  std::string error;
};

struct LagScanResult {
  std::vector<LagEntry> entries;
  int best_lag = 0;
  int min_overlap = 0;
};

// Correlates x[t] against y[t+lag] for every lag in [-max_lag, +max_lag];
// positive lag means x leads y. best_lag maximizes rho, ties resolved to the
// smallest |lag| and then to the negative one.
inline LagScanResult lag_scan(const DailySeries& x, const DailySeries& y, int max_lag,
                              int min_overlap = 10, PMethod method = PMethod::t_approx,
                              const PValueOptions& opts = {}) {
  if (max_lag < 0) throw Error(Errc::bad_argument, "max_lag must be >= 0");
  if (min_overlap < 3) min_overlap = 3;
  const AlignedPair base = align_pair(x, y);
  const long n = long(base.n());

  LagScanResult scan;
  scan.min_overlap = min_overlap;
  std::optional<CorrelationResult> best;
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    const long m = n - std::labs(lag);
    if (m < min_overlap) continue;
    const std::size_t xi = std::size_t(lag < 0 ? -lag : 0);
    const std::size_t yi = std::size_t(lag > 0 ? lag : 0);
    LagEntry entry;
    entry.lag_days = lag;
    entry.overlap = int(m);
    AlignedPair window;
    window.start = base.start + std::chrono::days(long(xi));
    window.x.assign(base.x.begin() + long(xi), base.x.begin() + long(xi) + m);
    window.y.assign(base.y.begin() + long(yi), base.y.begin() + long(yi) + m);
    try {
      CorrelationResult r = correlate(window, method, opts);
      r.lag_days = lag;
      entry.result = r;
    } catch (const Error& e) {
      entry.error = e.what();
    }
    scan.entries.push_back(std::move(entry));
    if (const auto& res = scan.entries.back().result) {
      const bool wins =
          !best || res->rho > best->rho ||
          (res->rho == best->rho && (std::abs(res->lag_days) < std::abs(best->lag_days) ||
                                     (std::abs(res->lag_days) == std::abs(best->lag_days) &&
                                      res->lag_days < best->lag_days)));
      if (wins) best = *res;
    }
  }
  if (!best) throw Error(Errc::no_valid_lag, "no lag with a usable correlation");
  scan.best_lag = best->lag_days;
  return scan;
}

struct RollingPoint {
  Date window_start{};
  std::optional<CorrelationResult> result;  // absent for constant-sided windows
  std::string error;
};

// Spearman rho + t-approx p over sliding windows. Windows where one side is
// constant come back flagged instead of failing the whole scan.
inline std::vector<RollingPoint> rolling_correlation(const AlignedPair& pair, int window = 28,
                                                     int step = 1) {
  if (window < 10) throw Error(Errc::bad_argument, "window must be >= 10");
  if (step < 1) throw Error(Errc::bad_argument, "step must be >= 1");
  const long n = long(pair.n());
  if (window > n) {
    throw Error(Errc::window_too_large,
                "window " + std::to_string(window) + " exceeds n = " + std::to_string(n));
  }
  std::vector<RollingPoint> out;
  for (long s = 0; s + window <= n; s += step) {
    RollingPoint pt;
    pt.window_start = pair.start + std::chrono::days(s);
    const std::span<const double> xs(pair.x.data() + s, std::size_t(window));
    const std::span<const double> ys(pair.y.data() + s, std::size_t(window));
    try {
      CorrelationResult r;
      r.rho = spearman_rho(xs, ys);
      r.p_value = p_value_t(r.rho, window);
      r.degenerate = std::fabs(r.rho) >= 1.0;
      r.n = window;
      pt.result = r;
    } catch (const Error& e) {
      pt.error = e.what();
    }
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace trendsurv
