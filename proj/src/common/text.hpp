#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fairgen {

/// 17 significant digits; strtod of the result restores the exact double.
std::string format_double(double v);
/// Shortest text that parses back to exactly v.
std::string format_double_short(double v);

/// Parses a full-token double; returns false on trailing garbage or empty input.
bool parse_double(std::string_view text, double& out);

std::vector<std::string> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary sibling and renames, so readers never see a torn file.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace fairgen
