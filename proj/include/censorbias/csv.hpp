#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace censorbias::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of `name` in the header; throws SchemaError when absent.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;
};

/// Parses comma-separated text with a header row. Double-quoted fields may hold commas,
/// doubled quotes and newlines. Throws SchemaError on empty input or ragged rows.
Table parse(std::string_view text);

Table read_file(const std::filesystem::path& path);

/// Quotes a field when it contains a comma, quote or line break.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

void write_file(const std::filesystem::path& path, const Table& table);

}  // namespace censorbias::csv
