#include <doctest.h>

#include "epiflow/date.hpp"
#include "epiflow/errors.hpp"

using namespace epiflow;

TEST_CASE("ISO round trip and arithmetic") {
    const Date d = Date::parse("2020-04-12");
    CHECK(d.to_string() == "2020-04-12");
    CHECK((d + 1).to_string() == "2020-04-13");
    CHECK((d + 263).to_string() == "2020-12-31");
    CHECK(Date::parse("2020-12-31") - d == 263);
    CHECK((d - 43).to_string() == "2020-02-29");  // leap year
}

TEST_CASE("epoch anchor") {
    CHECK(Date::parse("1970-01-01").days_since_epoch() == 0);
    CHECK(Date::parse("1970-01-08").days_since_epoch() == 7);
}

TEST_CASE("rejects malformed dates") {
    CHECK_THROWS_AS(Date::parse("2020/04/12"), ParseError);
    CHECK_THROWS_AS(Date::parse("2020-13-01"), ParseError);
    CHECK_THROWS_AS(Date::parse("2020-02-30"), ParseError);
    CHECK_THROWS_AS(Date::parse("not a date"), ParseError);
    CHECK_THROWS_AS(Date::parse("2020-04-12extra"), ParseError);
}

TEST_CASE("ordering") {
    CHECK(Date::parse("2020-04-12") < Date::parse("2020-04-13"));
    CHECK(Date::parse("2020-04-12") == Date::parse("2020-04-12"));
}
