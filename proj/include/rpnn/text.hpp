#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rpnn::text {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

std::string_view trim(std::string_view s);

/// Splits on `sep`; empty fields are kept.
std::vector<std::string_view> split(std::string_view s, char sep);

/// Splits on runs of blanks (space or tab).
std::vector<std::string_view> split_ws(std::string_view s);

} // namespace rpnn::text
