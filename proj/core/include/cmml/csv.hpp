#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace cmml::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC-4180 reader: quoted fields, doubled quotes, CRLF or LF, optional BOM.
// Every record must have as many fields as the header (DataError otherwise).
Table parse(std::string_view text);
Table read_file(const std::filesystem::path& path);

std::string quote_field(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

}  // namespace cmml::csv
