#pragma once

// Format-neutral output: named sections of rows, rendered as an aligned
// table, CSV or JSON.  Values are stored as produced by the library and
// printed in shortest round-trip form, so every format shows the same
// numbers.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace tender::cli {

using Value = std::variant<std::string, double, std::int64_t, bool>;

struct Section {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
  // Two-column "field,value" sections render as a JSON object.
  bool key_value = false;

  Section& add(std::vector<Value> row);
};

Section key_value_section(std::string name);

struct Document {
  std::vector<Section> sections;

  Section& section(std::string name, std::vector<std::string> columns);
  Section& fields(std::string name);
};

enum class Format { Table, Csv, Json };

Format parse_format(const std::string& name);
std::string format_value(const Value& v);

void render(std::ostream& out, const Document& doc, Format format);

}  // namespace tender::cli
