#include <catch2/catch_amalgamated.hpp>

#include "trendsurv/date.hpp"

using namespace trendsurv;

TEST_CASE("date parse and format round-trip", "[date]") {
  const auto d = parse_date("2020-03-02");
  REQUIRE(d.has_value());
  CHECK(format_date(*d) == "2020-03-02");
  CHECK(days_between(*d, *parse_date("2020-10-31")) == 243);
}

TEST_CASE("date parse rejects malformed input", "[date]") {
  CHECK_FALSE(parse_date("2020-02-30").has_value());  // impossible day
  CHECK_FALSE(parse_date("2020/03/02").has_value());  // wrong separator
  CHECK_FALSE(parse_date("2020-03").has_value());
  CHECK_FALSE(parse_date("2020-03-02x").has_value());  // trailing junk
  CHECK_FALSE(parse_date("").has_value());
}

TEST_CASE("date parse honors alternate patterns", "[date]") {
  const auto d = parse_date("02/03/2020", "%d/%m/%Y");
  REQUIRE(d.has_value());
  CHECK(format_date(*d) == "2020-03-02");
  CHECK(parse_date("3/2/2020", "%m/%d/%Y").value() == make_date(2020, 3, 2));
}

TEST_CASE("date arithmetic crosses month and year ends", "[date]") {
  CHECK(make_date(2020, 2, 29) + std::chrono::days(1) == make_date(2020, 3, 1));
  CHECK(make_date(2020, 12, 31) + std::chrono::days(1) == make_date(2021, 1, 1));
  CHECK_THROWS_AS(make_date(2021, 2, 29), Error);
}
