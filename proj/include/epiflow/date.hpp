#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace epiflow {

/// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
/// Arithmetic is in whole days; the simulator never needs sub-daily time.
class Date {
public:
    Date() = default;
    explicit Date(std::int64_t days) : days_(days) {}

    static Date from_ymd(int year, int month, int day);
    static Date parse(const std::string& iso);  // "YYYY-MM-DD", throws ParseError
    std::string to_string() const;

    std::int64_t days_since_epoch() const { return days_; }

    Date operator+(std::int64_t d) const { return Date(days_ + d); }
    Date operator-(std::int64_t d) const { return Date(days_ - d); }
    Date& operator+=(std::int64_t d) { days_ += d; return *this; }
    friend std::int64_t operator-(Date a, Date b) { return a.days_ - b.days_; }
    auto operator<=>(const Date&) const = default;

private:
    std::int64_t days_ = 0;
};

}  // namespace epiflow
