#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ccnli {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Fixed-point decimal with `digits` after the point.
std::string format_fixed(double v, int digits);

/// Locale-independent parse of a full field; throws ConfigError otherwise.
double parse_double(std::string_view text);

/// Comma-separated fields. No quoting: fields never contain commas.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace ccnli
