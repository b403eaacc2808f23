#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace growthfit {

/// Locale-independent formatting with `sig` significant digits, trailing
/// zeros trimmed. Used everywhere a number reaches a rendered document so
/// output is byte-stable across environments.
inline std::string fmt_sig(double x, int sig = 6) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, sig);
    return std::string(buf, res.ptr);
}

/// Shortest representation that round-trips the exact double.
inline std::string fmt_shortest(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

} // namespace growthfit
