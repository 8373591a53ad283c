#include "report.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace repairpred::cli {

namespace {

std::string fixed4(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string text_cell(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return fixed4(*d);
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "yes" : "no";
  return std::get<std::string>(v);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_cell(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return full_precision(*d);
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  return csv_escape(std::get<std::string>(v));
}

nlohmann::ordered_json json_value(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) {
    if (std::isfinite(*d)) return *d;
    return nullptr;
  }
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  return std::get<std::string>(v);
}

// Text columns after merging interval groups.
struct TextLayout {
  std::vector<std::string> headers;
  std::vector<std::vector<std::string>> cells;
};

TextLayout layout(const Table& t) {
  TextLayout out;
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (std::size_t c = 0; c < t.columns.size();) {
    if (t.columns[c].group == "interval" && c + 2 < t.columns.size() &&
        t.columns[c + 1].group == "interval" && t.columns[c + 2].group == "interval") {
      spans.emplace_back(c, 3);
      const auto& name = t.columns[c].name;
      const auto cut = name.rfind('_');
      out.headers.push_back((cut == std::string::npos ? name : name.substr(0, cut)) + " [width]");
      c += 3;
    } else {
      spans.emplace_back(c, 1);
      out.headers.push_back(t.columns[c].name);
      ++c;
    }
  }
  for (const auto& row : t.rows) {
    std::vector<std::string> line;
    for (const auto& [start, len] : spans) {
      if (start >= row.values.size()) {
        line.emplace_back("-");
      } else if (len == 3) {
        line.push_back("(" + text_cell(row.values[start]) + "," + text_cell(row.values[start + 1]) + ") [" +
                       text_cell(row.values[start + 2]) + "]");
      } else {
        line.push_back(text_cell(row.values[start]));
      }
    }
    if (!row.error.empty()) line.push_back("failed: " + row.error);
    out.cells.push_back(std::move(line));
  }
  return out;
}

void render_text(const Report& r, std::ostream& out) {
  out << "# " << r.command;
  if (!r.units.empty()) out << "  (units: " << r.units << ")";
  out << "\n";
  for (const auto& [key, value] : r.parameters) out << "#   " << key << " = " << text_cell(value) << "\n";
  for (const auto& t : r.tables) {
    out << "\n" << t.name << "\n";
    const auto lay = layout(t);
    std::vector<std::size_t> width(lay.headers.size());
    for (std::size_t c = 0; c < width.size(); ++c) width[c] = lay.headers[c].size();
    for (const auto& line : lay.cells) {
      for (std::size_t c = 0; c < std::min(line.size(), width.size()); ++c) width[c] = std::max(width[c], line[c].size());
    }
    auto emit = [&](const std::vector<std::string>& line) {
      for (std::size_t c = 0; c < line.size(); ++c) {
        if (c > 0) out << "  ";
        if (c < width.size()) {
          out << std::string(width[c] - line[c].size(), ' ') << line[c];
        } else {
          out << line[c];
        }
      }
      out << "\n";
    };
    emit(lay.headers);
    for (const auto& line : lay.cells) emit(line);
  }
}

void render_csv(const Report& r, std::ostream& out) {
  bool first = true;
  for (const auto& t : r.tables) {
    if (r.tables.size() > 1) {
      if (!first) out << "\n";
      out << "# " << t.name << "\n";
    }
    first = false;
    for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c].name;
    out << ",error\n";
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (c) out << ",";
        if (c < row.values.size()) out << csv_cell(row.values[c]);
      }
      out << "," << csv_escape(row.error) << "\n";
    }
  }
}

void render_json(const Report& r, std::ostream& out) {
  nlohmann::ordered_json doc;
  doc["command"] = r.command;
  doc["units"] = r.units;
  auto& params = doc["parameters"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : r.parameters) params[key] = json_value(value);
  for (const auto& t : r.tables) {
    auto& rows = doc[t.name] = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json obj;
      for (std::size_t c = 0; c < t.columns.size(); ++c) {
        obj[t.columns[c].name] = c < row.values.size() ? json_value(row.values[c]) : nlohmann::ordered_json(nullptr);
      }
      obj["error"] = row.error.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(row.error);
      rows.push_back(std::move(obj));
    }
  }
  out << doc.dump(2) << "\n";
}

}  // namespace

void Table::add_failure(std::vector<Value> key, std::string error) {
  rows.push_back({std::move(key), error.empty() ? "unknown error" : std::move(error)});
}

bool Table::all_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.error.empty(); });
}

std::string full_precision(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void render(const Report& report, Format format, std::ostream& out) {
  switch (format) {
    case Format::table:
      render_text(report, out);
      break;
    case Format::csv:
      render_csv(report, out);
      break;
    case Format::json:
      render_json(report, out);
      break;
  }
}

}  // namespace repairpred::cli
