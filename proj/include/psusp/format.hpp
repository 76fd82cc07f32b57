#pragma once

#include <charconv>
#include <string>

namespace psusp {

/// Locale-independent float with 9 significant digits.
inline std::string fmt9(double v) {
    char buf[48];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

}  // namespace psusp
