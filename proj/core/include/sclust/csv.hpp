#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace sclust::csv {

/// Splits one CSV record. Double-quoted fields may contain commas and "".
/// A trailing carriage return is dropped.
std::vector<std::string> split_line(std::string_view line);

/// Quotes a field only when it contains a comma, quote, or newline.
std::string escape(std::string_view field);

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

/// Parses a whole field as a double; returns false on trailing garbage.
bool parse_double(std::string_view text, double& out);

/// Parses a whole field as an int; returns false on trailing garbage.
bool parse_int(std::string_view text, int& out);

std::string_view trim(std::string_view s);

/// Opens a file for reading or throws IoError naming the path.
std::ifstream open_input(const std::filesystem::path& path);

/// Opens (truncating) a file for writing, creating parent directories.
std::ofstream open_output(const std::filesystem::path& path,
                          std::ios::openmode extra = {});

/// Joins fields with commas, escaping each.
std::string join(const std::vector<std::string>& fields);

}  // namespace sclust::csv
