#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace locrel {

/// Rectangular numeric result set with a provenance header. Emitted files
/// are byte-reproducible from (config, seed, version); a wall-clock stamp
/// is added only when explicitly requested.
struct ResultTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version;
  std::string timestamp;  ///< empty = omitted from output

  void add_row(std::initializer_list<double> values);
  void add_row(std::vector<double> values);

  void emit_csv(const std::string& path) const;
  void emit_json(const std::string& path) const;
  /// format is "csv" or "json".
  void emit(const std::string& format, const std::string& path) const;
};

/// Parses a CSV written by emit_csv (header comments + column row + data).
ResultTable parse_result_csv(const std::string& path);

/// Validates emitted JSON text against the documented result schema;
/// throws ValidationError with the offending field.
void validate_result_json(const std::string& text);

}  // namespace locrel
