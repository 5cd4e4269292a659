#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cellload {

// Shortest decimal form that parses back to the identical double
// (std::to_chars round-trip formatting).  Used everywhere a double is
// written to CSV so emitted files are value-exact and byte-deterministic.
std::string format_double(double value);

// Strict double parser; throws std::invalid_argument on trailing junk.
double parse_double(std::string_view text);

// Splits one CSV line on commas (no quoting; the formats here never need it).
std::vector<std::string_view> split_csv_line(std::string_view line);

}  // namespace cellload
