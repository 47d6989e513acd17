#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace swarmsim {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Appends format_double(value) to `out`.
void append_double(std::string& out, double value);

/// Strict full-token double parse; returns false on garbage or trailing text.
bool parse_double(std::string_view token, double& out);

/// Splits on `sep`, keeping empty fields.
std::vector<std::string_view> split(std::string_view line, char sep);

/// Splits on runs of spaces or tabs.
std::vector<std::string_view> split_whitespace(std::string_view line);

std::string_view trim(std::string_view s);

}  // namespace swarmsim
