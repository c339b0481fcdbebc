#pragma once

/// \file text.hpp
/// \brief Locale-independent number formatting/parsing and string splitting.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace skelfuse {

/// Shortest fixed-notation decimal that parses back to the same double.
std::string format_double(double v);

/// Fixed notation with `decimals` digits after the point.
std::string format_fixed(double v, int decimals);

/// Scientific/general notation with `digits` significant digits.
std::string format_significant(double v, int digits);

/// Whole-token parses; return false on trailing garbage or overflow.
bool parse_double(std::string_view s, double& out);
bool parse_int(std::string_view s, std::int64_t& out);

std::vector<std::string_view> split(std::string_view s, char sep);

std::string_view trim(std::string_view s);

} // namespace skelfuse
