#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mixhist {

/// Whole-file read; throws IOError (or MissingFile when the path does not exist).
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temporary then renames over the target, so readers never see a
/// partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

/// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_field(std::string_view value);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace mixhist
