#include "output.hpp"

#include <cmath>
#include <cstdio>

namespace mptosc {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

namespace {

std::string quote_csv(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

struct CsvCell {
  std::string operator()(Blank) const { return {}; }
  std::string operator()(double v) const { return format_number(v); }
  std::string operator()(std::int64_t v) const { return std::to_string(v); }
  std::string operator()(const std::string& v) const { return quote_csv(v); }
};

struct JsonCell {
  nlohmann::ordered_json operator()(Blank) const { return nullptr; }
  nlohmann::ordered_json operator()(double v) const {
    if (!std::isfinite(v)) return nullptr;
    return v;
  }
  nlohmann::ordered_json operator()(std::int64_t v) const { return v; }
  nlohmann::ordered_json operator()(const std::string& v) const { return v; }
};

}  // namespace

void write_csv(const OutputRecord& record, std::ostream& out) {
  for (std::size_t i = 0; i < record.columns.size(); ++i) {
    out << (i ? "," : "") << quote_csv(record.columns[i]);
  }
  out << '\n';
  for (const auto& row : record.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << std::visit(CsvCell{}, row[i]);
    }
    out << '\n';
  }
}

nlohmann::ordered_json to_json(const OutputRecord& record) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = record.schema_version;
  doc["command"] = record.command;
  doc["params_echo"] = record.params_echo;
  doc["columns"] = record.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : record.rows) {
    auto cells = nlohmann::ordered_json::array();
    for (const auto& cell : row) cells.push_back(std::visit(JsonCell{}, cell));
    rows.push_back(std::move(cells));
  }
  doc["rows"] = std::move(rows);
  return doc;
}

void write_json(const OutputRecord& record, std::ostream& out) { out << to_json(record).dump(2) << '\n'; }

void write_record(const OutputRecord& record, Format format, std::ostream& out) {
  if (format == Format::Json) {
    write_json(record, out);
  } else {
    write_csv(record, out);
  }
}

}  // namespace mptosc
