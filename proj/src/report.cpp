#include "dini/report.hpp"

#include "dini/types.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace dini {

std::string CsvTable::number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvTable& CsvTable::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  for (double x : values) cells.push_back(number(x));
  return row(cells);
}

CsvTable& CsvTable::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size())
    throw ContractError("csv row has " + std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(columns_.size()));
  rows_.push_back(cells);
  return *this;
}

std::string CsvTable::str() const {
  auto line = [](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += ',';
      bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
      if (!quote) {
        s += cells[i];
        continue;
      }
      s += '"';
      for (char c : cells[i]) s += c == '"' ? std::string("\"\"") : std::string(1, c);
      s += '"';
    }
    return s + "\n";
  };
  std::string out = line(columns_);
  for (const auto& r : rows_) out += line(r);
  return out;
}

Check& CheckList::at_most(const std::string& id, const std::string& description, double value, double threshold) {
  checks_.push_back({id, description, value <= threshold, value, threshold, ""});
  return checks_.back();
}

Check& CheckList::at_least(const std::string& id, const std::string& description, double value, double threshold) {
  checks_.push_back({id, description, value >= threshold, value, threshold, ""});
  return checks_.back();
}

Check& CheckList::flag(const std::string& id, const std::string& description, bool pass, const std::string& detail) {
  checks_.push_back({id, description, pass, pass ? 1.0 : 0.0, 1.0, detail});
  return checks_.back();
}

bool CheckList::all_pass() const {
  for (const auto& c : checks_)
    if (!c.pass) return false;
  return true;
}

std::vector<std::string> CheckList::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks_)
    if (!c.pass) out.push_back(c.id);
  return out;
}

CsvTable CheckList::table() const {
  CsvTable t({"id", "pass", "value", "threshold", "description", "detail"});
  for (const auto& c : checks_)
    t.row(std::vector<std::string>{c.id, c.pass ? "1" : "0", CsvTable::number(c.value), CsvTable::number(c.threshold),
                                   c.description, c.detail});
  return t;
}

Json number_json(double x) { return std::isfinite(x) ? Json(x) : Json(CsvTable::number(x)); }

Json CheckList::json() const {
  Json arr = Json::array();
  for (const auto& c : checks_) {
    Json j;
    j["id"] = c.id;
    j["pass"] = c.pass;
    j["value"] = number_json(c.value);
    j["threshold"] = number_json(c.threshold);
    j["description"] = c.description;
    if (!c.detail.empty()) j["detail"] = c.detail;
    arr.push_back(j);
  }
  return arr;
}

Json polynomial_json(const Polynomial& p) {
  Json arr = Json::array();
  for (const auto& [a, c] : p.terms()) {
    Json e;
    e["exponents"] = std::vector<int>(a.begin(), a.begin() + p.dim());
    e["coef"] = c;
    arr.push_back(e);
  }
  return arr;
}

Json vector_json(const std::vector<double>& v) {
  Json arr = Json::array();
  for (double x : v) arr.push_back(number_json(x));
  return arr;
}

void write_text(const std::string& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  std::string path = (std::filesystem::path(dir) / name).string();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << content;
  if (!f) throw Error("write failed for " + path);
}

void write_json(const std::string& dir, const std::string& name, const Json& j) {
  write_text(dir, name, j.dump(2) + "\n");
}

}  // namespace dini
