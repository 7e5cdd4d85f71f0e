#pragma once

// Calendar months.  Records carry YYYY-MM strings; internally every month is
// a zero-based index into a contiguous range so arithmetic is plain integers.

#include <charconv>
#include <compare>
#include <cstdint>
#include <string>

#include "teamflow/errors.hpp"

namespace teamflow {

using month_index = std::int32_t;

// calendar anchor for index 0 of a panel
struct calendar_month {
    int year = 0;
    int month = 1;  // 1..12

    auto operator<=>(const calendar_month&) const = default;

    // months since year 0, used for index conversion only
    std::int64_t absolute() const { return static_cast<std::int64_t>(year) * 12 + (month - 1); }
};

inline calendar_month parse_calendar_month(const std::string& text) {
    // strict YYYY-MM: four digits, dash, two digits
    auto fail = [&]() -> calendar_month {
        throw malformed_month("month not in YYYY-MM form: '" + text + "'");
    };
    if (text.size() != 7 || text[4] != '-') return fail();
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u})
        if (text[i] < '0' || text[i] > '9') return fail();
    calendar_month out;
    std::from_chars(text.data(), text.data() + 4, out.year);
    std::from_chars(text.data() + 5, text.data() + 7, out.month);
    if (out.month < 1 || out.month > 12) return fail();
    return out;
}

inline std::string format_calendar_month(calendar_month m) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", m.year, m.month);
    return std::string(buf);
}

inline calendar_month shift(calendar_month origin, month_index by) {
    std::int64_t abs = origin.absolute() + by;
    calendar_month out;
    out.year = static_cast<int>(abs / 12);
    out.month = static_cast<int>(abs % 12) + 1;
    if (out.month < 1) {  // negative absolute months
        out.month += 12;
        out.year -= 1;
    }
    return out;
}

}  // namespace teamflow
