#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hemobnn::csv {

// Minimal comma-separated reader: no quoting, no embedded commas.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Throws kMissingInput if the file cannot be opened, kMalformedFile on ragged rows.
Table read(const std::filesystem::path& path);

std::vector<std::string> split_line(std::string_view line);

// Strict full-field number parse; throws kMalformedFile naming `context`.
double parse_double(std::string_view field, std::string_view context);

// Shortest round-trip decimal representation (bit-faithful on re-read).
std::string format_exact(double value);
// Fixed number of significant digits ("%.*g").
std::string format_sig(double value, int digits);

// Writes text atomically enough for our purposes: truncates, writes, checks.
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace hemobnn::csv
