#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vcx::csv {

/// A parsed CSV file: one header row plus data rows. Quoted fields with
/// embedded commas, quotes ("") and newlines are supported.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of the first header cell equal to `name` (ASCII case-insensitive,
  /// surrounding whitespace ignored).
  std::optional<std::size_t> column(std::string_view name) const;
  /// First match among several accepted spellings.
  std::optional<std::size_t> column_any(std::initializer_list<std::string_view> names) const;
};

Table parse(std::string_view text);
Table read_file(const std::filesystem::path& path);

std::string escape(std::string_view field);

/// Joins fields into one CSV line (no trailing newline), quoting as needed.
std::string join(const std::vector<std::string>& fields);

/// Shortest round-trippable decimal form of a double ("" for NaN).
std::string format_double(double value);

std::string read_text_file(const std::filesystem::path& path);
std::vector<unsigned char> read_binary_file(const std::filesystem::path& path);

}  // namespace vcx::csv
