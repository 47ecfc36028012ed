#include "doctest.h"
#include "locrel/errors.hpp"
#include "locrel/result_table.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace locrel;
namespace fs = std::filesystem;

namespace {
std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
fs::path tmp_file(const char* name) { return fs::temp_directory_path() / name; }
}  // namespace

TEST_SUITE_BEGIN("result_table");

TEST_CASE("empty table emits a header-only file") {
  ResultTable t;
  t.name = "empty";
  t.columns = {"a", "b"};
  t.config_hash = "cafe";
  t.seed = 7;
  const auto p = tmp_file("locrel_empty.csv");
  t.emit_csv(p.string());
  const std::string text = slurp(p.string());
  CHECK(text.find("# config_hash: cafe") != std::string::npos);
  CHECK(text.find("a,b\n") != std::string::npos);
  const ResultTable back = parse_result_csv(p.string());
  CHECK(back.rows.empty());
  CHECK(back.columns == t.columns);
  fs::remove(p);
}

TEST_CASE("csv emit-parse-emit is byte stable") {
  ResultTable t;
  t.name = "roundtrip";
  t.columns = {"x", "y", "z"};
  t.config_hash = "beef";
  t.seed = 42;
  t.add_row({1.0, -2.5e-8, 3.14159265358979});
  t.add_row({1000.0, 0.0001234567890123, 7e300});
  const auto p1 = tmp_file("locrel_rt1.csv");
  const auto p2 = tmp_file("locrel_rt2.csv");
  t.emit_csv(p1.string());
  ResultTable back = parse_result_csv(p1.string());
  back.emit_csv(p2.string());
  CHECK(slurp(p1.string()) == slurp(p2.string()));
  fs::remove(p1);
  fs::remove(p2);
}

TEST_CASE("timestamps only appear when set") {
  ResultTable t;
  t.name = "stamped";
  t.columns = {"v"};
  const auto p = tmp_file("locrel_stamp.csv");
  t.emit_csv(p.string());
  CHECK(slurp(p.string()).find("timestamp") == std::string::npos);
  t.timestamp = "2000-01-01T00:00:00Z";
  t.emit_csv(p.string());
  CHECK(slurp(p.string()).find("# timestamp: 2000-01-01T00:00:00Z") != std::string::npos);
  fs::remove(p);
}

TEST_CASE("json output validates against the schema") {
  ResultTable t;
  t.name = "json";
  t.columns = {"x", "y"};
  t.config_hash = "00";
  t.add_row({1.0, 2.0});
  const auto p = tmp_file("locrel_tbl.json");
  t.emit_json(p.string());
  CHECK_NOTHROW(validate_result_json(slurp(p.string())));
  fs::remove(p);

  CHECK_THROWS_AS(validate_result_json("[]"), ValidationError);
  CHECK_THROWS_AS(validate_result_json(R"({"name":"x"})"), ValidationError);
  CHECK_THROWS_AS(validate_result_json(
                      R"({"name":"x","provenance":{"config_hash":"","seed":0,"version":""},
                          "columns":["a"],"rows":[[1,2]]})"),
                  ValidationError);
  CHECK_THROWS_AS(validate_result_json("nonsense"), ValidationError);
}

TEST_CASE("row width is enforced") {
  ResultTable t;
  t.columns = {"a", "b"};
  CHECK_THROWS_AS(t.add_row({1.0}), ValidationError);
  CHECK_THROWS_AS(t.emit("yaml", "whatever"), ValidationError);
}

TEST_SUITE_END();
