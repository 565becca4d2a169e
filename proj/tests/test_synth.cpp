#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "trendsurv/surveillance.hpp"
#include "trendsurv/synth.hpp"

using namespace trendsurv;

TEST_CASE("generate_pair is deterministic for a given seed", "[synth]") {
  SynthSpec spec;
  spec.n_days = 120;
  spec.seed = 42;
  const auto [x1, y1] = generate_pair(spec);
  const auto [x2, y2] = generate_pair(spec);
  CHECK(x1.values == x2.values);
  CHECK(y1.values == y2.values);

  spec.seed = 43;
  const auto [x3, y3] = generate_pair(spec);
  CHECK(x1.values != x3.values);
}

TEST_CASE("generate_pair output ranges", "[synth][property]") {
  for (auto curve : {CaseCurve::unimodal_peak, CaseCurve::bimodal, CaseCurve::flat}) {
    SynthSpec spec;
    spec.n_days = 200;
    spec.case_curve = curve;
    spec.noise_scale = 300.0;
    spec.target_spearman = 0.4;
    spec.seed = 7;
    const auto [trend, cases] = generate_pair(spec);
    REQUIRE(trend.size() == 200);
    REQUIRE(cases.size() == 200);
    for (double v : trend.values) {
      CHECK(v >= 0.0);
      CHECK(v <= 100.0);
      CHECK(v == std::round(v));  // discretized like a real export
    }
    for (double v : cases.values) {
      CHECK(v >= 0.0);
      CHECK(v == std::round(v));  // whole counts
    }
  }
}

TEST_CASE("generate_pair at target 1 with no noise is exactly comonotone", "[synth]") {
  SynthSpec spec;
  spec.n_days = 150;
  spec.target_spearman = 1.0;
  const auto [trend, cases] = generate_pair(spec);
  CHECK(spearman_rho(align_pair(trend, cases)) == 1.0);

  spec.target_spearman = -1.0;
  const auto [anti, cases2] = generate_pair(spec);
  CHECK(spearman_rho(align_pair(anti, cases2)) == -1.0);
}

TEST_CASE("generate_pair hits its Spearman target at scale", "[synth]") {
  SynthSpec spec;
  spec.n_days = 10000;
  spec.target_spearman = 0.7;
  spec.seed = 20240101;
  const auto [trend, cases] = generate_pair(spec);
  const double sample = spearman_rho(align_pair(trend, cases));
  CHECK(std::fabs(sample - 0.7) < 0.03);
}

TEST_CASE("generate_pair applies the lag as a lead of the trend side", "[synth]") {
  SynthSpec spec;
  spec.n_days = 244;
  spec.target_spearman = 1.0;
  spec.lag_days = 5;
  spec.seed = 11;
  const auto [trend, cases] = generate_pair(spec);
  const auto scan = lag_scan(trend, cases, 10);
  CHECK(scan.best_lag == 5);
}

TEST_CASE("media burst with zero amplitude is a no-op", "[synth]") {
  SynthSpec plain;
  plain.n_days = 100;
  plain.target_spearman = 0.6;
  plain.seed = 5;
  auto burst0 = plain;
  burst0.media_burst = MediaBurst{20, 10, 0.0};
  const auto [x_plain, y_plain] = generate_pair(plain);
  const auto [x_zero, y_zero] = generate_pair(burst0);
  CHECK(x_plain.values == x_zero.values);
  CHECK(y_plain.values == y_zero.values);
}

TEST_CASE("media burst perturbs only its window", "[synth]") {
  SynthSpec plain;
  plain.n_days = 100;
  plain.target_spearman = 0.6;
  plain.seed = 5;
  auto bursty = plain;
  bursty.media_burst = MediaBurst{20, 10, 40.0};
  const auto [x_plain, _1] = generate_pair(plain);
  const auto [x_burst, _2] = generate_pair(bursty);
  bool changed_inside = false;
  for (std::size_t i = 0; i < 100; ++i) {
    if (i >= 20 && i < 30) {
      changed_inside = changed_inside || x_burst.values[i] != x_plain.values[i];
      CHECK(x_burst.values[i] <= 100.0);
    } else {
      CHECK(x_burst.values[i] == x_plain.values[i]);
    }
  }
  CHECK(changed_inside);
}

TEST_CASE("generate_pair validates its spec", "[synth]") {
  SynthSpec spec;
  spec.n_days = 7;
  CHECK_THROWS_AS(generate_pair(spec), Error);
  spec.n_days = 50;
  spec.target_spearman = 1.5;
  CHECK_THROWS_AS(generate_pair(spec), Error);
  spec.target_spearman = 0.5;
  spec.noise_scale = -1;
  CHECK_THROWS_AS(generate_pair(spec), Error);
}

TEST_CASE("study fixture files are bit-identical across runs", "[synth]") {
  const std::vector<FixtureSymptom> symptoms{{"ache", 0.8, 0, 2}, {"chill", 0.3, 0, 1}};
  const auto f1 = generate_study_fixture(symptoms, 99);
  const auto f2 = generate_study_fixture(symptoms, 99);
  CHECK(f1.manifest_json == f2.manifest_json);
  CHECK(f1.cases_csv == f2.cases_csv);
  REQUIRE(f1.trend_files.size() == f2.trend_files.size());
  for (std::size_t i = 0; i < f1.trend_files.size(); ++i) {
    CHECK(f1.trend_files[i].first == f2.trend_files[i].first);
    CHECK(f1.trend_files[i].second == f2.trend_files[i].second);
  }
  const auto f3 = generate_study_fixture(symptoms, 100);
  CHECK(f1.cases_csv == f3.cases_csv);  // cases depend only on curve options
  CHECK(f1.trend_files[0].second != f3.trend_files[0].second);
}

TEST_CASE("study fixture round-trips through ingestion into a study", "[synth]") {
  const std::vector<FixtureSymptom> symptoms{
      {"strong", 0.85, 0, 3}, {"medium", 0.5, 0, 2}, {"faint", 0.15, 0, 1}};
  FixtureOptions opts;
  opts.n_days = 244;
  opts.noise_scale = 250.0;
  const auto fixture = generate_study_fixture(symptoms, 4242, opts);

  std::istringstream manifest_in(fixture.manifest_json);
  const auto manifest = parse_manifest(manifest_in);
  REQUIRE(manifest.entries.size() == 3);
  CHECK(manifest.entries[0].variants.size() == 3);

  std::vector<DailySeries> variant_series;
  for (const auto& [name, bytes] : fixture.trend_files) {
    std::istringstream in(bytes);
    for (auto& s : parse_trends_csv(in)) variant_series.push_back(std::move(s));
  }
  CHECK(variant_series.size() == 6);

  std::istringstream cases_in(fixture.cases_csv);
  const auto cases = parse_cases_csv(cases_in, CaseColumnMap{"date", "cases"});
  CHECK(cases.values == fixture.cases.values);

  StudyConfig config;
  config.period_start = opts.start;
  config.period_end = opts.start + std::chrono::days(opts.n_days - 1);
  const auto report = run_study(manifest, variant_series, cases, config);
  REQUIRE(report.rows.size() == 4);

  // Embedded ordering comes back out.
  const double strong = report.rows[0].daily.result->rho;
  const double medium = report.rows[1].daily.result->rho;
  const double faint = report.rows[2].daily.result->rho;
  CHECK(strong > medium);
  CHECK(medium > faint);
  CHECK(std::fabs(strong - 0.85) < 0.15);
  CHECK(std::fabs(medium - 0.5) < 0.2);
}

TEST_CASE("fixture with a lagged symptom is recovered by lag_scan", "[synth]") {
  const std::vector<FixtureSymptom> symptoms{{"early", 1.0, 5, 1}};
  const auto fixture = generate_study_fixture(symptoms, 31);
  std::istringstream in(fixture.trend_files[0].second);
  const auto trend = parse_trends_csv(in)[0];
  const auto scan = lag_scan(trend, fixture.cases, 10);
  CHECK(scan.best_lag == 5);
}

TEST_CASE("fixture variant columns sum back to a [0,100] signal", "[synth][property]") {
  const std::vector<FixtureSymptom> symptoms{{"split", 0.7, 0, 4}};
  const auto fixture = generate_study_fixture(symptoms, 8);
  std::istringstream in(fixture.trend_files[0].second);
  const auto cols = parse_trends_csv(in);
  REQUIRE(cols.size() == 4);
  for (std::size_t i = 0; i < cols[0].size(); ++i) {
    double sum = 0;
    for (const auto& c : cols) sum += c.values[i];
    CHECK(sum >= 0.0);
    CHECK(sum <= 100.0);
    CHECK(sum == std::round(sum));
  }
}
