#pragma once

// Shared serialization helpers.  Numbers are formatted with shortest
// round-trip std::to_chars so reruns produce byte-identical artifacts.

#include <charconv>
#include <cstdint>
#include <string>

namespace teamflow {

// bumped when any artifact layout changes
inline constexpr int schema_version = 1;

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_int(std::int64_t v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace teamflow
