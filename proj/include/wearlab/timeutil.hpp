#pragma once

#include <cstdint>
#include <string>

#include "wearlab/common.hpp"

namespace wearlab {

// Calendar date (proleptic Gregorian).
struct Date {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31

    auto operator<=>(const Date&) const = default;
};

// Days since 1970-01-01 (Howard Hinnant's civil algorithms).
int64_t days_from_civil(const Date& d);
Date civil_from_days(int64_t days);

// 0 = Monday ... 6 = Sunday.
int weekday(const Date& d);
inline bool is_weekend(const Date& d) { return weekday(d) >= 5; }

Date parse_date(const std::string& s);       // YYYY-MM-DD
std::string format_date(const Date& d);

inline Date add_days(const Date& d, int64_t n) { return civil_from_days(days_from_civil(d) + n); }

// Instant with the wall-clock offset it was recorded at. Ordering and window
// filters use the instant; day-part and date logic use the local wall clock.
struct Timestamp {
    int64_t epoch_sec = 0;   // UTC
    int32_t offset_sec = 0;  // local = UTC + offset

    int64_t local_sec() const { return epoch_sec + offset_sec; }
    Date local_date() const;
    // Minutes after local midnight, in [0, 1440).
    double local_minute_of_day() const;

    bool operator<(const Timestamp& o) const { return epoch_sec < o.epoch_sec; }
    bool operator==(const Timestamp& o) const { return epoch_sec == o.epoch_sec; }
};

// Strict ISO-8601 with explicit offset: YYYY-MM-DDTHH:MM:SS(+HH:MM|-HH:MM|Z).
Timestamp parse_timestamp(const std::string& s);
std::string format_timestamp(const Timestamp& t);

Timestamp make_timestamp(const Date& d, int hour, int minute, int second, int32_t offset_sec);

}  // namespace wearlab
