#include "modecause/csv.hpp"

#include <stdexcept>

#include "modecause/util.hpp"

namespace modecause {

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  bool record_started = false;
  bool at_line_start = true;
  bool in_comment = false;

  const std::size_t n = text.size();
  auto end_field = [&] {
    record.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    table.records.push_back(record);
    record.clear();
    record_started = false;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const char c = text[i];
    if (in_comment) {
      if (c == '\n') {
        if (!table.comments.empty() && table.comments.back().ends_with("\r"))
          table.comments.back().pop_back();
        in_comment = false;
        at_line_start = true;
      } else {
        table.comments.back().push_back(c);
      }
      continue;
    }
    if (at_line_start && !in_quotes && !record_started && c == '#') {
      table.comments.emplace_back();
      in_comment = true;
      continue;
    }
    at_line_start = false;
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < n && text[i + 1] == '"') {
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
        if (field.empty() && !field_started) {
          in_quotes = true;
          field_started = true;
          record_started = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',':
        end_field();
        record_started = true;
        break;
      case '\r':
        break;
      case '\n':
        if (record_started || field_started || !field.empty()) end_record();
        at_line_start = true;
        break;
      default:
        field.push_back(c);
        field_started = true;
        record_started = true;
        break;
    }
  }
  if (in_quotes) throw std::runtime_error("csv: unterminated quoted field");
  if (record_started || field_started || !field.empty()) end_record();
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  return parse_csv(read_text_file(path));
}

std::string csv_escape(const std::string& field) {
  bool needs_quotes = false;
  for (char c : field) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += csv_escape(fields[i]);
  }
  out.push_back('\n');
  return out;
}

}  // namespace modecause
