#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tvpdr {

/// Shortest decimal string that round-trips to the same double ("-inf", "inf", "nan" for specials).
std::string format_number(double value);

/// Parses a full string as a double; throws std::invalid_argument otherwise.
double parse_number(std::string_view text);

std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace tvpdr
