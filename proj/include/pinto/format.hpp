#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace pinto {

/// Shortest text that parses back to exactly the same double.
std::string format_double(double v);

/// Coordinate text: four fixed decimals when that is exact, otherwise the
/// shortest round-trip representation.
std::string format_coord(double v);

/// Depth text: integral values without decimals ("-672"), others shortest.
std::string format_depth(double v);

/// Level text: integral values with one decimal ("-5.0"), others shortest.
std::string format_level(double v);

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

}  // namespace pinto
