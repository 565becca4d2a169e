#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>
#include <sstream>

#include "trendsurv/ingest.hpp"
#include "trendsurv/report.hpp"

using namespace trendsurv;

namespace {

StudyReport one_row_report() {
  StudyReport report;
  report.n_daily = 244;
  report.n_weekly = 34;
  StudyRow row;
  row.symptom_id = "ache";
  row.display_name = "Ache";
  CorrelationResult daily{0.705, 1.35e-16, 244, PMethod::t_approx, 0, false};
  CorrelationResult weekly{0.830, 3.12e-4, 34, PMethod::t_approx, 0, false};
  row.daily = {daily, classify(daily.rho, daily.p_value), ""};
  row.weekly = {weekly, classify(weekly.rho, weekly.p_value), ""};
  row.total_rsv = 21428;
  report.rows.push_back(row);

  StudyRow all = row;
  all.symptom_id = "all_symptoms";
  all.display_name = "All Symptoms";
  report.rows.push_back(all);
  return report;
}

}  // namespace

TEST_CASE("csv render: header plus one line per row", "[report]") {
  const auto text = render_table(one_row_report(), RenderFormat::csv);
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] ==
        "symptom,daily_r,daily_p,weekly_r,weekly_p,class_daily,class_weekly,total_rsv");
  CHECK(lines[1] == "Ache,0.705,1.35e-16,0.830,3.12e-04,high,high,21428");
  CHECK(lines[2].substr(0, 12) == "All Symptoms");
}

TEST_CASE("rendering is byte-stable", "[report]") {
  const auto report = one_row_report();
  for (auto format : {RenderFormat::csv, RenderFormat::json, RenderFormat::markdown}) {
    CHECK(render_table(report, format) == render_table(report, format));
  }
}

TEST_CASE("csv and json carry the same numbers", "[report]") {
  const auto report = one_row_report();
  const auto doc = nlohmann::json::parse(render_table(report, RenderFormat::json));
  const auto csv_text = render_table(report, RenderFormat::csv);

  REQUIRE(doc["rows"].size() == 2);
  const auto& row = doc["rows"][0];
  CHECK(row["daily"]["r"] == "0.705");
  CHECK(row["daily"]["p"] == "1.35e-16");
  CHECK(csv_text.find("0.705,1.35e-16") != std::string::npos);

  // json additionally exposes full precision
  CHECK(row["daily"]["raw"]["rho"].get<double>() == 0.705);
  CHECK(row["daily"]["raw"]["n"].get<int>() == 244);
}

TEST_CASE("error rows render as markers, not numbers", "[report]") {
  StudyReport report;
  report.n_daily = 30;
  report.n_weekly = 4;
  StudyRow row;
  row.symptom_id = "flat";
  row.display_name = "Flat";
  row.daily.error = "ZeroVariance: y side is constant";
  row.weekly.error = row.daily.error;
  report.rows.push_back(row);
  const auto text = render_table(report, RenderFormat::csv);
  CHECK(text.find("NA,NA,NA,NA") != std::string::npos);
  CHECK(text.find("error(ZeroVariance") != std::string::npos);

  const auto doc = nlohmann::json::parse(render_table(report, RenderFormat::json));
  CHECK(doc["rows"][0]["daily"].contains("error"));
}

TEST_CASE("markdown render produces a pipe table", "[report]") {
  const auto text = render_table(one_row_report(), RenderFormat::markdown);
  CHECK(text.find("| Symptom |") == 0);
  CHECK(text.find("| Ache | 0.705 |") != std::string::npos);
}

TEST_CASE("plot data emits one long row per day per series", "[report]") {
  SymptomSignal signal;
  signal.symptom_id = "ache";
  signal.daily = DailySeries{make_date(2020, 3, 2), {1, 2, 3}, "ache"};
  signal.total_rsv = 6;
  const DailySeries cases{make_date(2020, 3, 2), {9, 8, 7}, "cases"};

  const auto text = render_plot_data(signal, cases, RenderFormat::csv);
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 7);  // header + 3 signal + 3 cases
  CHECK(lines[0] == "date,series,value");
  CHECK(lines[1] == "2020-03-02,ache,1");
  CHECK(lines[4] == "2020-03-02,cases,9");

  const auto rows = nlohmann::json::parse(render_plot_data(signal, cases, RenderFormat::json));
  CHECK(rows.size() == 6);
}

TEST_CASE("plot data rejects misaligned ranges", "[report]") {
  SymptomSignal signal;
  signal.symptom_id = "ache";
  signal.daily = DailySeries{make_date(2020, 3, 2), {1, 2, 3}, "ache"};
  const DailySeries cases{make_date(2020, 3, 3), {9, 8, 7}, "cases"};
  CHECK_THROWS_MATCHES(render_plot_data(signal, cases, RenderFormat::csv), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::range_mismatch;
                       }));
}
