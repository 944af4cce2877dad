#pragma once

// Minimal CSV helpers shared by the readers and report writers.

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace datesso::csv {

std::vector<std::string_view> split(std::string_view line, char sep = ',');
std::string_view trim(std::string_view s);

std::optional<std::int64_t> parse_int(std::string_view s);
std::optional<double> parse_double(std::string_view s);

/// Shortest representation that round-trips through parse_double.
std::string format(double value);

}  // namespace datesso::csv
