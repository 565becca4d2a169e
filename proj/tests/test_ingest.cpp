#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "trendsurv/ingest.hpp"

using namespace trendsurv;

namespace {

bool code_is(const Error& e, Errc c) { return e.code() == c; }

std::vector<DailySeries> parse_trends(const std::string& text, TrendsParseOptions opts = {}) {
  std::istringstream in(text);
  return parse_trends_csv(in, opts);
}

DailySeries parse_cases(const std::string& text, CaseColumnMap map = {"date", "cases", "%Y-%m-%d"},
                        MissingPolicy policy = MissingPolicy::error) {
  std::istringstream in(text);
  return parse_cases_csv(in, map, policy);
}

SymptomManifest parse_manifest_str(const std::string& text) {
  std::istringstream in(text);
  return parse_manifest(in);
}

const std::string kTwoDayExport =
    "Category: All categories\n"
    "\n"
    "Day,fever: (Atlantis)\n"
    "2020-03-02,57\n"
    "2020-03-03,<1\n";

}  // namespace

TEST_CASE("trends export parses with censored cells and geo stripping", "[ingest]") {
  const auto series = parse_trends(kTwoDayExport);
  REQUIRE(series.size() == 1);
  CHECK(series[0].label == "fever");
  CHECK(series[0].start == make_date(2020, 3, 2));
  CHECK(series[0].values == std::vector<double>{57.0, 0.5});
}

TEST_CASE("trends censored value is overridable", "[ingest]") {
  TrendsParseOptions opts;
  opts.censored_value = 1.0;
  CHECK(parse_trends(kTwoDayExport, opts)[0].values == std::vector<double>{57.0, 1.0});
  opts.censored_value = 0.0;
  CHECK(parse_trends(kTwoDayExport, opts)[0].values == std::vector<double>{57.0, 0.0});
}

TEST_CASE("trends parser handles CRLF and multiple columns", "[ingest]") {
  const std::string text =
      "Category: All categories\r\n\r\nDay,cough: (Economy),chills\r\n"
      "2020-03-02,10,3\r\n2020-03-03,12,0\r\n2020-03-04,9,<1\r\n";
  const auto series = parse_trends(text);
  REQUIRE(series.size() == 2);
  CHECK(series[0].label == "cough");
  CHECK(series[1].label == "chills");  // no geo suffix to strip
  CHECK(series[1].values == std::vector<double>{3, 0, 0.5});
}

TEST_CASE("trends parser error paths", "[ingest]") {
  CHECK_THROWS_MATCHES(parse_trends("date,fever\n2020-03-02,5\n"), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return code_is(e, Errc::malformed_header); }));
  CHECK_THROWS_MATCHES(parse_trends("Day,q\n2020-03-02,135\n"), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return code_is(e, Errc::value_out_of_range); }));
  CHECK_THROWS_MATCHES(parse_trends("Day,q\n2020-03-02,abc\n"), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return code_is(e, Errc::non_numeric_cell); }));
  CHECK_THROWS_MATCHES(parse_trends("Day,q\n2020-03-02,5\n2020-03-04,6\n"), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return code_is(e, Errc::gap_found); }));
}

TEST_CASE("trends gap policies apply during ingestion", "[ingest]") {
  const std::string gapped = "Day,q\n2020-03-02,2\n2020-03-04,6\n";
  TrendsParseOptions opts;
  opts.missing = MissingPolicy::linear;
  CHECK(parse_trends(gapped, opts)[0].values == std::vector<double>{2, 4, 6});
  opts.missing = MissingPolicy::zero;
  CHECK(parse_trends(gapped, opts)[0].values == std::vector<double>{2, 0, 6});
}

TEST_CASE("cases parser happy path and errors", "[ingest]") {
  const auto s = parse_cases("date,cases\n2020-03-02,1\n2020-03-03,0\n");
  CHECK(s.values == std::vector<double>{1, 0});
  CHECK(s.label == "cases");

  CHECK_THROWS_MATCHES(parse_cases("date,cases\n2020-03-02,-4\n"), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return code_is(e, Errc::negative_count); }));
  CHECK_THROWS_MATCHES(parse_cases("date,confirmed\n2020-03-02,1\n"), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return code_is(e, Errc::missing_column); }));
  CHECK_THROWS_MATCHES(parse_cases("date,cases\n03/02/2020,1\n"), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return code_is(e, Errc::unparsable_date); }));
}

TEST_CASE("cases parser honors the column map", "[ingest]") {
  const std::string text =
      "region,Date,New Cases\nall,02/03/2020,7\nall,03/03/2020,9\n";
  const auto s = parse_cases(text, {"Date", "New Cases", "%d/%m/%Y"});
  CHECK(s.start == make_date(2020, 3, 2));
  CHECK(s.values == std::vector<double>{7, 9});
}

TEST_CASE("cases parser accepts quoted cells", "[ingest]") {
  const auto s = parse_cases("date,\"cases\"\n2020-03-02,\"3\"\n", {"date", "cases"});
  CHECK(s.values == std::vector<double>{3});
}

TEST_CASE("manifest parses a ten-symptom document", "[ingest]") {
  // Same shape as a real keyword-group table: 10 groups, 26 variants total.
  SymptomManifest m;
  const int counts[] = {3, 4, 3, 3, 2, 1, 4, 4, 1, 1};
  for (int g = 0; g < 10; ++g) {
    ManifestEntry e;
    e.id = "symptom_" + std::to_string(g);
    e.display_name = "Symptom " + std::to_string(g);
    e.language = "en";
    for (int v = 0; v < counts[g]; ++v) {
      e.variants.push_back("query " + std::to_string(g) + "." + std::to_string(v));
    }
    m.entries.push_back(e);
  }
  const auto parsed = parse_manifest_str(manifest_to_json(m));
  REQUIRE(parsed.entries.size() == 10);
  std::size_t variants = 0;
  for (const auto& e : parsed.entries) variants += e.variants.size();
  CHECK(variants == 26);
  CHECK(parsed.entries[1].variants.size() == 4);
}

TEST_CASE("manifest keeps non-ascii variant text intact", "[ingest]") {
  const std::string doc = R"({"entries":[
    {"id":"ache","display_name":"Ache","language":"und",
     "variants":["δοκιμή","ทดสอบ","muña"]}]})";
  const auto m = parse_manifest_str(doc);
  REQUIRE(m.entries.size() == 1);
  CHECK(m.entries[0].variants[0] == "δοκιμή");
  const auto again = parse_manifest_str(manifest_to_json(m));
  CHECK(again.entries[0].variants == m.entries[0].variants);
}

TEST_CASE("manifest error paths", "[ingest]") {
  CHECK_THROWS_MATCHES(
      parse_manifest_str(R"({"entries":[{"id":"fever","variants":["a"]},
                                        {"id":"fever","variants":["b"]}]})"),
      Error, Catch::Matchers::Predicate<Error>(
                 [](const Error& e) { return code_is(e, Errc::duplicate_id); }));
  CHECK_THROWS_MATCHES(parse_manifest_str(R"({"entries":[{"id":"fever","variants":[]}]})"),
                       Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return code_is(e, Errc::empty_variants);
                       }));
  CHECK_THROWS_MATCHES(parse_manifest_str("{"), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return code_is(e, Errc::malformed_document);
                       }));
  CHECK_THROWS_MATCHES(
      parse_manifest_str(R"({"entries":[{"id":"Fever!","variants":["a"]}]})"), Error,
      Catch::Matchers::Predicate<Error>(
          [](const Error& e) { return code_is(e, Errc::malformed_document); }));
  CHECK_THROWS_MATCHES(
      parse_manifest_str(R"({"entries":[{"id":"fever","variants":["a","a"]}]})"), Error,
      Catch::Matchers::Predicate<Error>(
          [](const Error& e) { return code_is(e, Errc::malformed_document); }));
}

TEST_CASE("trends write/parse round-trip preserves columns and values", "[ingest][property]") {
  std::vector<DailySeries> cols;
  for (int c = 0; c < 3; ++c) {
    DailySeries s{make_date(2020, 6, 1), {}, "query " + std::to_string(c)};
    for (int i = 0; i < 15; ++i) s.values.push_back(double((i * (c + 3)) % 101));
    s.values[4] = 0.5;  // a censored cell survives the trip as its stand-in
    cols.push_back(s);
  }
  const auto text = trends_to_csv(cols, "Atlantis");
  std::istringstream in(text);
  const auto parsed = parse_trends_csv(in);
  REQUIRE(parsed.size() == cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    CHECK(parsed[c].label == cols[c].label);
    CHECK(parsed[c].start == cols[c].start);
    CHECK(parsed[c].values == cols[c].values);
  }
}

TEST_CASE("cases write/parse round-trip", "[ingest][property]") {
  DailySeries cases{make_date(2020, 3, 2), {}, "cases"};
  for (int i = 0; i < 40; ++i) cases.values.push_back(double((i * 37) % 250));
  std::istringstream in(cases_to_csv(cases));
  const auto parsed = parse_cases_csv(in, CaseColumnMap{"date", "cases"});
  CHECK(parsed.start == cases.start);
  CHECK(parsed.values == cases.values);
}
