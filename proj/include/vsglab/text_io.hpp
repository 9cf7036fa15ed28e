#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vsglab::text {

// Shortest decimal text that round-trips to the same double.
std::string format_double(double x);
double parse_double(std::string_view s);

std::vector<std::string_view> split(std::string_view line, char sep);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace vsglab::text
