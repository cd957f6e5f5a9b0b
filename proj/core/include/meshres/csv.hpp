#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace meshres::csv {

// Shortest decimal that parses back to the same double.
std::string format_double(double value);
// Fixed-point with the given number of decimals.
std::string format_fixed(double value, int decimals);

double parse_double(std::string_view field);
long long parse_int(std::string_view field);

// Splits one line on commas. Fields are never quoted in our formats; a
// field containing a comma is rejected on write instead.
std::vector<std::string> split(std::string_view line);
std::string join(const std::vector<std::string>& fields);

}  // namespace meshres::csv
