#pragma once

#include "dini/hhp.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace dini {

using Json = nlohmann::ordered_json;

// CSV with a fixed header; numbers are written with %.17g.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  static std::string number(double x);

  CsvTable& row(const std::vector<double>& values);
  CsvTable& row(const std::vector<std::string>& cells);
  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

// Named pass/fail assertions of a run. IDs are stable and greppable.
struct Check {
  std::string id;
  std::string description;
  bool pass = false;
  double value = 0;
  double threshold = 0;
  std::string detail;
};

class CheckList {
 public:
  // pass when value <= threshold
  Check& at_most(const std::string& id, const std::string& description, double value, double threshold);
  Check& at_least(const std::string& id, const std::string& description, double value, double threshold);
  Check& flag(const std::string& id, const std::string& description, bool pass, const std::string& detail = "");
  void add(Check c) { checks_.push_back(std::move(c)); }

  const std::vector<Check>& checks() const { return checks_; }
  bool all_pass() const;
  std::vector<std::string> failures() const;
  CsvTable table() const;
  Json json() const;

 private:
  std::vector<Check> checks_;
};

// Coefficient list [{"exponents": [...], "coef": c}] in deterministic order.
Json polynomial_json(const Polynomial& p);
// Non-finite values become the strings "inf", "-inf", "nan".
Json number_json(double x);
Json vector_json(const std::vector<double>& v);

// Files are written whole; directories are created as needed.
void write_text(const std::string& dir, const std::string& name, const std::string& content);
void write_json(const std::string& dir, const std::string& name, const Json& j);

}  // namespace dini
