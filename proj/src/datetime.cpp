#include "sheetloop/datetime.hpp"

#include <cctype>
#include <cstdio>

namespace sheetloop {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static const int table[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return table[m - 1];
}

// Parses an integer field of 1..max_digits digits; advances pos.
bool read_int(std::string_view s, size_t& pos, int max_digits, int& out) {
    int v = 0;
    int n = 0;
    while (pos < s.size() && n < max_digits &&
           std::isdigit(static_cast<unsigned char>(s[pos]))) {
        v = v * 10 + (s[pos] - '0');
        ++pos;
        ++n;
    }
    if (n == 0) return false;
    out = v;
    return true;
}

bool read_char(std::string_view s, size_t& pos, char c) {
    if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
    }
    return false;
}

}  // namespace

bool Date::valid(int y, int m, int d) {
    return y >= 1 && y <= 9999 && m >= 1 && m <= 12 && d >= 1 && d <= days_in_month(y, m);
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

std::optional<Date> Date::parse(std::string_view text) {
    size_t pos = 0;
    int a = 0, b = 0, c = 0;

    // ISO: YYYY-MM-DD (year must be 4 digits)
    size_t p = 0;
    if (read_int(text, p, 4, a) && p == 4 && read_char(text, p, '-') &&
        read_int(text, p, 2, b) && read_char(text, p, '-') && read_int(text, p, 2, c) &&
        p == text.size() && valid(a, b, c)) {
        return Date{a, b, c};
    }

    // US style: M/D/YYYY
    pos = 0;
    if (read_int(text, pos, 2, a) && read_char(text, pos, '/') && read_int(text, pos, 2, b) &&
        read_char(text, pos, '/') && read_int(text, pos, 4, c) && pos == text.size() &&
        valid(c, a, b)) {
        return Date{c, a, b};
    }
    return std::nullopt;
}

std::string DateTime::to_string() const {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d", date.year, date.month,
                  date.day, hour, minute, second);
    return buf;
}

std::optional<DateTime> DateTime::parse(std::string_view text) {
    size_t sep = text.find_first_of("T ");
    if (sep == std::string_view::npos) return std::nullopt;
    auto d = Date::parse(text.substr(0, sep));
    if (!d) return std::nullopt;

    std::string_view t = text.substr(sep + 1);
    size_t pos = 0;
    int hh = 0, mm = 0, ss = 0;
    if (!read_int(t, pos, 2, hh) || !read_char(t, pos, ':') || !read_int(t, pos, 2, mm)) {
        return std::nullopt;
    }
    if (pos < t.size()) {
        if (!read_char(t, pos, ':') || !read_int(t, pos, 2, ss) || pos != t.size()) {
            return std::nullopt;
        }
    }
    if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
    return DateTime{*d, hh, mm, ss};
}

}  // namespace sheetloop
