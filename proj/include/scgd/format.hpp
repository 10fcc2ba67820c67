#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace scgd {

/// Shortest decimal that round-trips to the same double (std::to_chars).
std::string format_double(double value);

/// Strict parse of a whole token; throws ConfigError naming `what`.
double parse_double(std::string_view token, std::string_view what);
long long parse_integer(std::string_view token, std::string_view what);

std::vector<std::string_view> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

}  // namespace scgd
