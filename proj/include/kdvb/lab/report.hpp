#pragma once

// Run reports: one JSON document per experiment plus a CSV per table.

#include <openssl/sha.h>

#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "kdvb/errors.hpp"

namespace kdvb::lab {

using Json = nlohmann::ordered_json;

struct Check {
  std::string name;
  int criterion = 0;  // acceptance criterion this feeds, 0 for none
  bool passed = false;
  double value = 0;
  double threshold = 0;
  std::string relation;  // "<=", ">=", "<", ">", "=="
  std::string detail;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row) {
    require(row.size() == columns.size(), "table " + name + ": row width mismatch");
    rows.push_back(std::move(row));
  }
};

struct RunReport {
  std::string name, experiment;
  Json config;
  std::string input_hash;
  std::vector<Check> checks;
  std::deque<Table> tables;  // deque: table() references stay valid
  // Not serialized: wall-clock would break byte-identical reports.
  double wall_seconds = 0;
  std::map<int, double> criterion_seconds;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }

  Check& check(std::string name, int criterion, double value, std::string relation, double threshold,
               std::string detail = "") {
    bool ok = false;
    if (relation == "<=") ok = value <= threshold;
    else if (relation == "<") ok = value < threshold;
    else if (relation == ">=") ok = value >= threshold;
    else if (relation == ">") ok = value > threshold;
    else if (relation == "==") ok = value == threshold;
    else throw InvalidArgument("check: unknown relation " + relation);
    checks.push_back({std::move(name), criterion, ok, value, threshold, std::move(relation), std::move(detail)});
    return checks.back();
  }
  Check& flag(std::string name, int criterion, bool ok, std::string detail = "") {
    checks.push_back({std::move(name), criterion, ok, ok ? 1.0 : 0.0, 1.0, "==", std::move(detail)});
    return checks.back();
  }
  Table& table(std::string name, std::vector<std::string> columns) {
    tables.push_back({std::move(name), std::move(columns), {}});
    return tables.back();
  }
};

// Git blob id: SHA-1 over "blob <size>\0<content>".
inline std::string git_blob_hash(const std::string& content) {
  const std::string blob = "blob " + std::to_string(content.size()) + std::string(1, '\0') + content;
  unsigned char md[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), md);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char c : md) {
    out += hex[c >> 4];
    out += hex[c & 15];
  }
  return out;
}

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Non-finite values become strings so the document stays valid JSON.
inline Json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

inline Json to_json(const RunReport& r) {
  Json j;
  j["name"] = r.name;
  j["experiment"] = r.experiment;
  j["input_hash"] = r.input_hash;
  j["config"] = r.config;
  j["passed"] = r.passed();
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json e;
    e["name"] = c.name;
    e["criterion"] = c.criterion;
    e["passed"] = c.passed;
    e["value"] = json_number(c.value);
    e["relation"] = c.relation;
    e["threshold"] = json_number(c.threshold);
    if (!c.detail.empty()) e["detail"] = c.detail;
    checks.push_back(e);
  }
  j["checks"] = checks;
  Json tables = Json::array();
  for (const auto& t : r.tables) {
    Json e;
    e["name"] = t.name;
    e["file"] = r.name + "." + t.name + ".csv";
    e["columns"] = t.columns;
    Json rows = Json::array();
    for (const auto& row : t.rows) {
      Json jr = Json::array();
      for (double v : row) jr.push_back(json_number(v));
      rows.push_back(jr);
    }
    e["rows"] = rows;
    tables.push_back(e);
  }
  j["tables"] = tables;
  return j;
}

inline std::string to_csv(const Table& t) {
  std::string s;
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  s += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + format_number(row[i]);
    s += "\n";
  }
  return s;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << content;
}

inline void write_report(const RunReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / (r.name + ".json"), to_json(r).dump(2) + "\n");
  for (const auto& t : r.tables) write_file(dir / (r.name + "." + t.name + ".csv"), to_csv(t));
}

}  // namespace kdvb::lab
