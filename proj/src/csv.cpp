#include "hexaccess/csv.hpp"

#include "hexaccess/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace hexaccess {

CsvTable CsvTable::parse(std::string_view text, std::string source_name) {
  CsvTable table;
  table.source_ = std::move(source_name);
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> starts;
  std::vector<std::string> record;
  std::string field;
  std::size_t line = 1;
  std::size_t record_line = 1;
  bool quoted = false;
  bool field_started = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // blank lines are skipped
    if (!(record.size() == 1 && record.front().empty())) {
      records.push_back(std::move(record));
      starts.push_back(record_line);
    }
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) {
          throw DataError(table.source_ + ":" + std::to_string(line) + ": stray quote inside unquoted field");
        }
        quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (quoted) throw DataError(table.source_ + ": unterminated quoted field");
  if (field_started || !record.empty()) end_record();

  if (records.empty()) throw DataError(table.source_ + ": missing header row");
  table.header_ = std::move(records.front());
  for (std::size_t c = 0; c < table.header_.size(); ++c) {
    table.header_[c] = trim(table.header_[c]);
    table.index_.emplace(table.header_[c], c);
  }
  for (std::size_t r = 1; r < records.size(); ++r) {
    table.rows_.push_back(std::move(records[r]));
    table.lines_.push_back(starts[r]);
  }
  return table;
}

CsvTable CsvTable::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.string());
}

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t CsvTable::require_column(std::string_view name) const {
  if (auto c = column(name)) return *c;
  throw DataError(source_ + ": missing column '" + std::string(name) + "'");
}

std::string_view CsvTable::field(std::size_t row, std::size_t column) const {
  const auto& r = rows_[row];
  if (column >= r.size()) return {};
  return r[column];
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<double> parse_double(std::string_view s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = t.data();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size()) return std::nullopt;
  return value;
}

}  // namespace hexaccess
