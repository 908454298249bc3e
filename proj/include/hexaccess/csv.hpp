#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hexaccess {

/// RFC-4180 table with a header row. A UTF-8 byte-order mark is skipped.
class CsvTable {
 public:
  static CsvTable parse(std::string_view text, std::string source_name = "<memory>");
  static CsvTable read(const std::filesystem::path& path);

  const std::vector<std::string>& header() const noexcept { return header_; }
  std::size_t size() const noexcept { return rows_.size(); }
  const std::string& source() const noexcept { return source_; }

  std::optional<std::size_t> column(std::string_view name) const;
  /// Throws DataError naming the file when the column is absent.
  std::size_t require_column(std::string_view name) const;

  const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }
  /// 1-based physical line number where row i starts (the header is line 1).
  std::size_t line(std::size_t i) const { return lines_[i]; }

  /// Field value, or empty when the row is short.
  std::string_view field(std::size_t row, std::size_t column) const;

 private:
  std::string source_;
  std::vector<std::string> header_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::size_t> lines_;
};

/// Quotes a field only when RFC-4180 requires it.
std::string csv_escape(std::string_view field);

std::string trim(std::string_view s);
/// Whole-string double parse; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view s);

}  // namespace hexaccess
