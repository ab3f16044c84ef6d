#pragma once

// Tabular output shared by every subcommand: long-format CSV or a JSON
// document that carries the echoed parameters alongside the rows.

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace mptosc {

inline constexpr const char* kSchemaVersion = "1.0";

/// Empty cell (CSV) / null (JSON).
struct Blank {};

using Cell = std::variant<Blank, double, std::int64_t, std::string>;

struct OutputRecord {
  std::string schema_version = kSchemaVersion;
  std::string command;
  nlohmann::ordered_json params_echo = nlohmann::ordered_json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

enum class Format { Csv, Json };

/// Decimal with 17 significant digits; non-finite values as nan/inf/-inf.
std::string format_number(double value);

void write_csv(const OutputRecord& record, std::ostream& out);
void write_json(const OutputRecord& record, std::ostream& out);
void write_record(const OutputRecord& record, Format format, std::ostream& out);

nlohmann::ordered_json to_json(const OutputRecord& record);

}  // namespace mptosc
