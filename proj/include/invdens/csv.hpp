#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace invdens {

/// 17 significant digits, printf %.17g.
std::string format_g17(double v);

/// Shortest representation that parses back to the same double.
std::string format_shortest(double v);

std::vector<std::string> split_csv_line(std::string_view line);

/// Strict full-field parse; throws IoError on garbage.
double parse_double(std::string_view field);

/// "# generated <UTC time>" header line used by bench outputs.
std::string timestamp_line();

} // namespace invdens
