#include "document.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>

#include "json.hpp"
#include "tender/errors.hpp"

namespace tender::cli {

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

nlohmann::ordered_json to_json(const Value& v) {
  return std::visit([](const auto& x) { return nlohmann::ordered_json(x); }, v);
}

void render_table(std::ostream& out, const Document& doc) {
  bool first = true;
  for (const auto& s : doc.sections) {
    if (!first) out << '\n';
    first = false;
    out << s.name << '\n';
    std::vector<std::size_t> width(s.columns.size(), 0);
    std::vector<std::vector<std::string>> cells;
    std::vector<std::vector<bool>> numeric;
    for (std::size_t c = 0; c < s.columns.size(); ++c) width[c] = s.columns[c].size();
    for (const auto& row : s.rows) {
      auto& line = cells.emplace_back();
      auto& right = numeric.emplace_back();
      for (std::size_t c = 0; c < row.size(); ++c) {
        line.push_back(format_value(row[c]));
        right.push_back(std::holds_alternative<double>(row[c]) ||
                        std::holds_alternative<std::int64_t>(row[c]));
        width[c] = std::max(width[c], line.back().size());
      }
    }
    auto print_row = [&](const std::vector<std::string>& row, const std::vector<bool>& right) {
      std::string line = "  ";
      for (std::size_t c = 0; c < row.size(); ++c) {
        line += right[c] ? fmt::format("{:>{}}", row[c], width[c])
                         : fmt::format("{:<{}}", row[c], width[c]);
        if (c + 1 < row.size()) line += "  ";
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      out << line << '\n';
    };
    if (!s.key_value) {
      const std::vector<bool> left(s.columns.size(), false);
      print_row(s.columns, left);
      std::vector<std::string> rule;
      for (const auto w : width) rule.emplace_back(w, '-');
      print_row(rule, left);
    }
    for (std::size_t r = 0; r < cells.size(); ++r) print_row(cells[r], numeric[r]);
  }
}

void render_csv(std::ostream& out, const Document& doc) {
  bool first = true;
  for (const auto& s : doc.sections) {
    if (!first) out << '\n';
    first = false;
    out << "# " << s.name << '\n';
    for (std::size_t c = 0; c < s.columns.size(); ++c) {
      out << (c ? "," : "") << csv_cell(s.columns[c]);
    }
    out << '\n';
    for (const auto& row : s.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        out << (c ? "," : "") << csv_cell(format_value(row[c]));
      }
      out << '\n';
    }
  }
}

void render_json(std::ostream& out, const Document& doc) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& s : doc.sections) {
    if (s.key_value) {
      auto obj = nlohmann::ordered_json::object();
      for (const auto& row : s.rows) obj[format_value(row[0])] = to_json(row[1]);
      j[s.name] = std::move(obj);
    } else {
      auto arr = nlohmann::ordered_json::array();
      for (const auto& row : s.rows) {
        nlohmann::ordered_json obj;
        for (std::size_t c = 0; c < row.size(); ++c) obj[s.columns[c]] = to_json(row[c]);
        arr.push_back(std::move(obj));
      }
      j[s.name] = std::move(arr);
    }
  }
  out << j.dump(2) << '\n';
}

}  // namespace

Section& Section::add(std::vector<Value> row) {
  if (row.size() != columns.size()) {
    throw ValidationError("internal: row width does not match section " + name);
  }
  rows.push_back(std::move(row));
  return *this;
}

Section key_value_section(std::string name) {
  Section s;
  s.name = std::move(name);
  s.columns = {"field", "value"};
  s.key_value = true;
  return s;
}

Section& Document::section(std::string name, std::vector<std::string> columns) {
  auto& s = sections.emplace_back();
  s.name = std::move(name);
  s.columns = std::move(columns);
  return s;
}

Section& Document::fields(std::string name) {
  sections.push_back(key_value_section(std::move(name)));
  return sections.back();
}

Format parse_format(const std::string& name) {
  if (name == "table") return Format::Table;
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw ValidationError("--format must be table, csv or json, not '" + name + "'");
}

std::string format_value(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (const auto* d = std::get_if<double>(&v)) return fmt::format("{}", *d);
  if (const auto* i = std::get_if<std::int64_t>(&v)) return fmt::format("{}", *i);
  return std::get<bool>(v) ? "true" : "false";
}

void render(std::ostream& out, const Document& doc, Format format) {
  switch (format) {
    case Format::Table: render_table(out, doc); break;
    case Format::Csv: render_csv(out, doc); break;
    case Format::Json: render_json(out, doc); break;
  }
}

}  // namespace tender::cli
