#include "cmml/csv.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cmml/error.hpp"

namespace cmml::csv {

namespace {

// Splits text into records of fields. Record index counts records, not
// physical lines, so quoted newlines do not shift it.
std::vector<std::vector<std::string>> split_records(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  bool record_has_content = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (record_has_content || record.size() > 1 || !record.front().empty()) {
      records.push_back(std::move(record));
    }
    record.clear();
    record_has_content = false;
  };

  std::size_t i = 0;
  if (text.starts_with("\xEF\xBB\xBF")) i = 3;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started && field.empty()) {
          in_quotes = true;
          field_started = true;
          record_has_content = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',':
        end_field();
        record_has_content = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
        record_has_content = true;
    }
  }
  if (in_quotes) throw DataError("unterminated quoted field at end of input");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

}  // namespace

Table parse(std::string_view text) {
  auto records = split_records(text);
  if (records.empty()) throw DataError("missing header row");
  Table table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw DataError("row " + std::to_string(r - 1) + " has " +
                          std::to_string(records[r].size()) + " fields, expected " +
                          std::to_string(table.header.size()),
                      r - 1);
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

Table read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::string quote_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << quote_field(fields[i]);
  }
  out << '\n';
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

}  // namespace cmml::csv
