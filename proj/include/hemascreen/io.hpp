#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace hemascreen {

/// Shortest decimal form that parses back to the same double.
std::string format_real(double value);

/// Fixed-point rendering for labels, e.g. format_fixed(0.9512, 2) == "0.95".
std::string format_fixed(double value, int digits);

/// Strict full-string parse; surrounding blanks are ignored, anything else fails.
std::optional<double> parse_real(std::string_view text);
std::optional<int> parse_int(std::string_view text);

std::string trim(std::string_view text);

/// Writes via a sibling temporary file and rename, so readers never observe a
/// partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace hemascreen
