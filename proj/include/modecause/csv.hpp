#pragma once

#include <string>
#include <vector>

namespace modecause {

// RFC 4180-style CSV. Fields containing commas, quotes or newlines are
// quoted; embedded quotes are doubled. Lines starting with '#' outside of
// any record are treated as comments (used for provenance headers).
struct CsvTable {
  std::vector<std::string> comments;             // leading '#' lines, verbatim
  std::vector<std::vector<std::string>> records; // first record is the header
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv_file(const std::string& path);

std::string csv_escape(const std::string& field);
std::string format_csv_row(const std::vector<std::string>& fields);

}  // namespace modecause
