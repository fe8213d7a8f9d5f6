#include "pinto/format.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <system_error>

namespace pinto {

std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_coord(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    if (auto back = parse_double(buf); back && *back == v) return buf;
    return format_double(v);
}

std::string format_depth(double v)
{
    if (std::isfinite(v) && v == std::trunc(v) && std::abs(v) < 1e15) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.0f", v);
        return buf;
    }
    return format_double(v);
}

std::string format_level(double v)
{
    if (std::isfinite(v) && v == std::trunc(v) && std::abs(v) < 1e15) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.1f", v);
        return buf;
    }
    return format_double(v);
}

std::optional<double> parse_double(std::string_view text)
{
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
    return v;
}

std::optional<long long> parse_int(std::string_view text)
{
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    long long v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
    return v;
}

}  // namespace pinto
