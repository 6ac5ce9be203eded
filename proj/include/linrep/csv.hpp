#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace linrep::csv {

/// Shortest-independent fixed format: 17 significant digits, which round
/// trips every double.
std::string format(double value);

std::vector<std::string> split(std::string_view line, char sep = ',');

/// Strict parse; throws std::invalid_argument on trailing garbage.
double parse_double(std::string_view text);

}  // namespace linrep::csv
