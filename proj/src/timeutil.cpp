#include "wearlab/timeutil.hpp"

#include <cstdio>

namespace wearlab {

int64_t days_from_civil(const Date& d) {
    int y = d.year;
    const int m = d.month;
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d.day) - 1u;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

Date civil_from_days(int64_t z) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t y = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

int weekday(const Date& d) {
    const int64_t days = days_from_civil(d);
    return static_cast<int>(((days % 7) + 10) % 7);  // 1970-01-01 was a Thursday
}

namespace {

bool parse_int_field(const std::string& s, size_t pos, size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (size_t i = pos; i < pos + len; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        v = v * 10 + (s[i] - '0');
    }
    out = v;
    return true;
}

}  // namespace

Date parse_date(const std::string& s) {
    Date d;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-' ||
        !parse_int_field(s, 0, 4, d.year) || !parse_int_field(s, 5, 2, d.month) ||
        !parse_int_field(s, 8, 2, d.day)) {
        throw DomainError("invalid date '" + s + "' (expected YYYY-MM-DD)");
    }
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31) {
        throw DomainError("date out of range: '" + s + "'");
    }
    return d;
}

std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

Date Timestamp::local_date() const {
    int64_t ls = local_sec();
    int64_t days = ls / 86400;
    if (ls % 86400 < 0) --days;
    return civil_from_days(days);
}

double Timestamp::local_minute_of_day() const {
    int64_t ls = local_sec() % 86400;
    if (ls < 0) ls += 86400;
    return static_cast<double>(ls) / 60.0;
}

Timestamp parse_timestamp(const std::string& s) {
    // YYYY-MM-DDTHH:MM:SS then Z or +HH:MM / -HH:MM
    int Y, M, D, h, m, sec;
    if (s.size() < 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' ||
        s[16] != ':' || !parse_int_field(s, 0, 4, Y) || !parse_int_field(s, 5, 2, M) ||
        !parse_int_field(s, 8, 2, D) || !parse_int_field(s, 11, 2, h) ||
        !parse_int_field(s, 14, 2, m) || !parse_int_field(s, 17, 2, sec)) {
        throw DomainError("invalid timestamp '" + s + "'");
    }
    if (M < 1 || M > 12 || D < 1 || D > 31 || h > 23 || m > 59 || sec > 60) {
        throw DomainError("timestamp field out of range: '" + s + "'");
    }
    int32_t offset = 0;
    const char tail = s[19];
    if (tail == 'Z') {
        if (s.size() != 20) throw DomainError("trailing characters in timestamp '" + s + "'");
    } else if (tail == '+' || tail == '-') {
        int oh, om;
        if (s.size() != 25 || s[22] != ':' || !parse_int_field(s, 20, 2, oh) ||
            !parse_int_field(s, 23, 2, om) || oh > 14 || om > 59) {
            throw DomainError("invalid offset in timestamp '" + s + "'");
        }
        offset = (oh * 3600 + om * 60) * (tail == '-' ? -1 : 1);
    } else {
        throw DomainError("timestamp '" + s + "' lacks an explicit offset");
    }
    const int64_t days = days_from_civil(Date{Y, M, D});
    const int64_t local = days * 86400 + h * 3600 + m * 60 + sec;
    return Timestamp{local - offset, offset};
}

std::string format_timestamp(const Timestamp& t) {
    int64_t ls = t.local_sec();
    int64_t days = ls / 86400;
    int64_t rem = ls % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    const Date d = civil_from_days(days);
    const int h = static_cast<int>(rem / 3600);
    const int m = static_cast<int>((rem % 3600) / 60);
    const int s = static_cast<int>(rem % 60);
    const int32_t off = t.offset_sec;
    char buf[40];
    if (off == 0) {
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", d.year, d.month, d.day, h,
                      m, s);
    } else {
        const int32_t a = off < 0 ? -off : off;
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d%c%02d:%02d", d.year, d.month,
                      d.day, h, m, s, off < 0 ? '-' : '+', a / 3600, (a % 3600) / 60);
    }
    return buf;
}

Timestamp make_timestamp(const Date& d, int hour, int minute, int second, int32_t offset_sec) {
    const int64_t local = days_from_civil(d) * 86400 + hour * 3600 + minute * 60 + second;
    return Timestamp{local - offset_sec, offset_sec};
}

}  // namespace wearlab
