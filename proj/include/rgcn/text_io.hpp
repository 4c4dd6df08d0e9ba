#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rgcn {

/// 17 significant digits; parse_double(format_double(x)) == x bit for bit.
std::string format_double(double x);
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

std::vector<std::string> split(std::string_view text, char delimiter);
std::vector<std::string> split_whitespace(std::string_view text);
std::string_view trim(std::string_view text);

}  // namespace rgcn
