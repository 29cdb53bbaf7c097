#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <system_error>

namespace qjump {

// Shortest round-trip decimal form; locale-independent, so identical inputs
// always serialize to identical bytes.
inline std::string fmt_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

inline std::string fmt_u64(std::uint64_t v) {
    char buf[24];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace qjump
