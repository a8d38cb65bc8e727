#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sheetloop {

/// Calendar date, no timezone. Valid range: year 1..9999.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;

    std::string to_string() const;  // ISO-8601: YYYY-MM-DD

    /// Accepts ISO-8601 (2024-01-15) and M/D/YYYY (12/27/1964).
    static std::optional<Date> parse(std::string_view text);
    static bool valid(int y, int m, int d);
};

/// Calendar date plus seconds-of-day, no timezone.
struct DateTime {
    Date date;
    int hour = 0;
    int minute = 0;
    int second = 0;

    auto operator<=>(const DateTime&) const = default;

    std::string to_string() const;  // YYYY-MM-DDTHH:MM:SS

    /// ISO-8601 with 'T' or space separator.
    static std::optional<DateTime> parse(std::string_view text);
};

}  // namespace sheetloop
