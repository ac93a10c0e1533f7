#include "epiflow/date.hpp"

#include <cstdio>

#include "epiflow/errors.hpp"

namespace epiflow {

// Civil-from-days / days-from-civil after Howard Hinnant's chrono algorithms.
static std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

static void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

Date Date::from_ymd(int year, int month, int day) {
    if (month < 1 || month > 12 || day < 1 || day > 31)
        throw ParseError("invalid calendar date " + std::to_string(year) + "-" +
                         std::to_string(month) + "-" + std::to_string(day));
    return Date(days_from_civil(year, month, day));
}

Date Date::parse(const std::string& iso) {
    int y = 0, m = 0, d = 0;
    char extra = 0;
    if (std::sscanf(iso.c_str(), "%d-%d-%d%c", &y, &m, &d, &extra) != 3)
        throw ParseError("unparseable ISO-8601 date '" + iso + "'");
    Date date = from_ymd(y, m, d);
    if (date.to_string() != iso)
        throw ParseError("invalid ISO-8601 date '" + iso + "'");
    return date;
}

std::string Date::to_string() const {
    int y, m, d;
    civil_from_days(days_, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
    return buf;
}

}  // namespace epiflow
