#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ada/geometry.hpp"

namespace ada::text {

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

// Strict decimal parse; throws DataError mentioning `context` on failure or
// on non-finite values.
double parse_double(std::string_view token, std::string_view context);
long long parse_int(std::string_view token, std::string_view context);

std::string_view trim(std::string_view s);

// Splits on any of `delims`, dropping empty fields.
std::vector<std::string_view> split(std::string_view s, std::string_view delims);

// Boxes serialize as "[x_min, y_min, x_max, y_max]".
std::string format_box(const BoundingBox& box);
BoundingBox parse_box(std::string_view text, std::string_view context);

std::string format_vector(const std::vector<double>& values);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace ada::text
