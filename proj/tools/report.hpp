#pragma once

// Tabular results and their three renderings (aligned text, csv, json).

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace repairpred::cli {

using Value = std::variant<std::int64_t, double, std::string, bool>;

struct Column {
  std::string name;
  /// Consecutive columns sharing group "interval" print as (lower,upper) [width] in text mode.
  std::string group;
};

struct Row {
  std::vector<Value> values;
  /// Empty when the row succeeded.
  std::string error;
};

struct Table {
  std::string name;
  std::vector<Column> columns;
  std::vector<Row> rows;

  void add(std::vector<Value> values) { rows.push_back({std::move(values), {}}); }
  void add_failure(std::vector<Value> key, std::string error);
  bool all_ok() const;
};

struct Report {
  std::string command;
  std::string units;
  std::vector<std::pair<std::string, Value>> parameters;
  std::vector<Table> tables;
};

enum class Format { table, csv, json };

void render(const Report& report, Format format, std::ostream& out);

/// %.17g, or "nan" / "inf".
std::string full_precision(double v);

}  // namespace repairpred::cli
