#include "locrel/result_table.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "locrel/errors.hpp"
#include "locrel/version.hpp"

namespace locrel {

namespace {
std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}
}  // namespace

void ResultTable::add_row(std::initializer_list<double> values) {
  add_row(std::vector<double>(values));
}

void ResultTable::add_row(std::vector<double> values) {
  if (values.size() != columns.size())
    throw ValidationError("result row width does not match the column count");
  rows.push_back(std::move(values));
}

void ResultTable::emit_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "# name: " << name << '\n';
  out << "# config_hash: " << config_hash << '\n';
  out << "# seed: " << seed << '\n';
  out << "# version: " << (version.empty() ? kVersion : version) << '\n';
  if (!timestamp.empty()) out << "# timestamp: " << timestamp << '\n';
  for (std::size_t c = 0; c < columns.size(); ++c)
    out << columns[c] << (c + 1 < columns.size() ? "," : "");
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      out << format_double(row[c]) << (c + 1 < row.size() ? "," : "");
    out << '\n';
  }
  if (!out) throw IoError("short write to " + path);
}

void ResultTable::emit_json(const std::string& path) const {
  nlohmann::json prov{{"config_hash", config_hash},
                      {"seed", seed},
                      {"version", version.empty() ? kVersion : version}};
  if (!timestamp.empty()) prov["timestamp"] = timestamp;
  nlohmann::json j{{"name", name},
                   {"provenance", std::move(prov)},
                   {"columns", columns},
                   {"rows", rows}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("short write to " + path);
}

void ResultTable::emit(const std::string& format, const std::string& path) const {
  if (format == "csv")
    emit_csv(path);
  else if (format == "json")
    emit_json(path);
  else
    throw ValidationError("unknown output format: " + format);
}

ResultTable parse_result_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  ResultTable t;
  std::string line;
  bool have_columns = false;
  auto header_value = [](const std::string& l, const std::string& key) {
    const std::string tag = "# " + key + ": ";
    return l.rfind(tag, 0) == 0 ? l.substr(tag.size()) : std::string();
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (auto v = header_value(line, "name"); !v.empty()) t.name = v;
      if (auto v = header_value(line, "config_hash"); !v.empty()) t.config_hash = v;
      if (auto v = header_value(line, "seed"); !v.empty()) t.seed = std::stoull(v);
      if (auto v = header_value(line, "version"); !v.empty()) t.version = v;
      if (auto v = header_value(line, "timestamp"); !v.empty()) t.timestamp = v;
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    if (!have_columns) {
      while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
      have_columns = true;
    } else {
      std::vector<double> row;
      while (std::getline(ss, cell, ',')) {
        try {
          row.push_back(std::stod(cell));
        } catch (const std::exception&) {
          throw ParseError(path + ": bad numeric cell '" + cell + "'");
        }
      }
      t.add_row(std::move(row));
    }
  }
  if (!have_columns) throw ParseError(path + ": missing column header row");
  return t;
}

void validate_result_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("result JSON unparsable: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("result JSON: top level must be an object");
  for (const char* key : {"name", "provenance", "columns", "rows"})
    if (!j.contains(key))
      throw ValidationError(std::string("result JSON: missing key ") + key);
  if (!j["name"].is_string()) throw ValidationError("result JSON: name must be a string");
  const auto& prov = j["provenance"];
  if (!prov.is_object()) throw ValidationError("result JSON: provenance must be an object");
  for (const char* key : {"config_hash", "seed", "version"})
    if (!prov.contains(key))
      throw ValidationError(std::string("result JSON: provenance missing ") + key);
  if (!j["columns"].is_array())
    throw ValidationError("result JSON: columns must be an array");
  const std::size_t width = j["columns"].size();
  for (const auto& c : j["columns"])
    if (!c.is_string()) throw ValidationError("result JSON: column names must be strings");
  if (!j["rows"].is_array()) throw ValidationError("result JSON: rows must be an array");
  for (const auto& row : j["rows"]) {
    if (!row.is_array() || row.size() != width)
      throw ValidationError("result JSON: rows must be arrays matching the column count");
    for (const auto& v : row)
      if (!v.is_number()) throw ValidationError("result JSON: row entries must be numbers");
  }
}

}  // namespace locrel
