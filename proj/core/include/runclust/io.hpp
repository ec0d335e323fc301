#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace runclust {

/// Shortest decimal representation that round-trips to the same double.
std::string format_number(double value);

/// Splits one CSV line on commas. Quoting is not supported; fields are
/// trimmed of surrounding whitespace and a trailing '\r'.
std::vector<std::string_view> split_csv_line(std::string_view line);

/// Parses a whole field as a double; returns false on trailing garbage.
bool parse_double(std::string_view field, double& out);

/// Reads a text file into lines. Throws DataError if it cannot be opened.
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// creating parent directories as needed.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

}  // namespace runclust
