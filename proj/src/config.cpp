#include "dini/config.hpp"

#include "dini/types.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace dini {

namespace {

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

// Value-level parse failure; the caller adds the location.
struct BadValue {
  std::string msg;
};

double to_double(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    double a = to_double(trim(s.substr(0, slash))), b = to_double(trim(s.substr(slash + 1)));
    if (b == 0) throw BadValue{"division by zero in '" + s + "'"};
    return a / b;
  }
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
    throw BadValue{"expected a number, got '" + s + "'"};
  return v;
}

long long to_int(const std::string& s) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size()) throw BadValue{"expected an integer, got '" + s + "'"};
  return v;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

std::vector<double> to_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& t : split(s, ',')) out.push_back(to_double(t));
  return out;
}

struct Key {
  std::string section, name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Key num(const char* sec, const char* name, T RunConfig::*part, double T::*m) {
  return {sec, name, [=](RunConfig& c, const std::string& v) { (c.*part).*m = to_double(v); },
          [=](const RunConfig& c) { return fmt((c.*part).*m); }};
}
template <class T>
Key integer(const char* sec, const char* name, T RunConfig::*part, int T::*m) {
  return {sec, name, [=](RunConfig& c, const std::string& v) {
            long long x = to_int(v);
            if (x < -1000000000LL || x > 1000000000LL) throw BadValue{"integer out of range"};
            (c.*part).*m = static_cast<int>(x);
          },
          [=](const RunConfig& c) { return std::to_string((c.*part).*m); }};
}
template <class T>
Key text(const char* sec, const char* name, T RunConfig::*part, std::string T::*m) {
  return {sec, name, [=](RunConfig& c, const std::string& v) { (c.*part).*m = v; },
          [=](const RunConfig& c) { return (c.*part).*m; }};
}
template <class T>
Key list(const char* sec, const char* name, T RunConfig::*part, std::vector<double> T::*m) {
  return {sec, name, [=](RunConfig& c, const std::string& v) { (c.*part).*m = to_list(v); },
          [=](const RunConfig& c) { return join((c.*part).*m); }};
}

const std::vector<Key>& schema() {
  static const std::vector<Key> keys = [] {
    using R = RunConfig;
    std::vector<Key> k;
    k.push_back({"run", "scenario", [](R& c, const std::string& v) { c.scenario = v; },
                 [](const R& c) { return c.scenario; }});
    k.push_back({"run", "seed",
                 [](R& c, const std::string& v) {
                   std::uint64_t x = 0;
                   auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
                   if (v.empty() || ec != std::errc() || p != v.data() + v.size())
                     throw BadValue{"expected an unsigned 64-bit integer, got '" + v + "'"};
                   c.seed = x;
                 },
                 [](const R& c) { return std::to_string(c.seed); }});
    k.push_back({"run", "out", [](R& c, const std::string& v) { c.out = v; }, [](const R& c) { return c.out; }});
    k.push_back({"run", "samples",
                 [](R& c, const std::string& v) {
                   long long x = to_int(v);
                   if (x < 0 || x > 100000000) throw BadValue{"samples out of range"};
                   c.samples = static_cast<int>(x);
                 },
                 [](const R& c) { return std::to_string(c.samples); }});

    k.push_back(text("modulus", "kind", &R::modulus, &ModulusSpec::kind));
    k.push_back(num("modulus", "exponent", &R::modulus, &ModulusSpec::exponent));
    k.push_back(num("modulus", "scale", &R::modulus, &ModulusSpec::scale));
    k.push_back(list("modulus", "table_r", &R::modulus, &ModulusSpec::table_r));
    k.push_back(list("modulus", "table_v", &R::modulus, &ModulusSpec::table_v));
    k.push_back(num("modulus", "R", &R::modulus, &ModulusSpec::R));
    k.push_back(num("modulus", "beta", &R::modulus, &ModulusSpec::beta));
    k.push_back(num("modulus", "quad_tol", &R::modulus, &ModulusSpec::quad_tol));
    k.push_back(num("modulus", "freq_constant", &R::modulus, &ModulusSpec::freq_constant));

    k.push_back(integer("domain", "dim", &R::domain, &DomainSpec::dim));
    k.push_back(text("domain", "family", &R::domain, &DomainSpec::family));
    k.push_back(num("domain", "c0", &R::domain, &DomainSpec::c0));
    k.push_back(num("domain", "alpha", &R::domain, &DomainSpec::alpha));
    k.push_back(list("domain", "x0", &R::domain, &DomainSpec::x0));
    k.push_back(num("domain", "chart_radius", &R::domain, &DomainSpec::chart_radius));

    k.push_back(text("field", "source", &R::field, &FieldSpec::source));
    k.push_back(text("field", "fixture", &R::field, &FieldSpec::fixture));
    k.push_back(list("field", "center", &R::field, &FieldSpec::center));
    k.push_back(num("field", "R", &R::field, &FieldSpec::R));
    k.push_back(num("field", "h", &R::field, &FieldSpec::h));
    k.push_back(num("field", "h_fine", &R::field, &FieldSpec::h_fine));
    k.push_back(text("field", "bc", &R::field, &FieldSpec::bc));

    k.push_back(list("ladder", "frequency", &R::ladder, &LadderSpec::frequency));
    k.push_back(list("ladder", "blowup", &R::ladder, &LadderSpec::blowup));
    k.push_back(list("ladder", "bands", &R::ladder, &LadderSpec::bands));
    k.push_back(list("ladder", "order", &R::ladder, &LadderSpec::order));
    k.push_back(list("ladder", "continuity", &R::ladder, &LadderSpec::continuity));
    k.push_back({"ladder", "pairs",
                 [](R& c, const std::string& v) {
                   c.ladder.pairs.clear();
                   for (const auto& t : split(v, ',')) {
                     auto colon = t.find(':');
                     if (colon == std::string::npos) throw BadValue{"expected s:r, got '" + t + "'"};
                     c.ladder.pairs.emplace_back(to_double(trim(t.substr(0, colon))), to_double(trim(t.substr(colon + 1))));
                   }
                 },
                 [](const R& c) {
                   std::string s;
                   for (std::size_t i = 0; i < c.ladder.pairs.size(); ++i)
                     s += (i ? ", " : "") + fmt(c.ladder.pairs[i].first) + ":" + fmt(c.ladder.pairs[i].second);
                   return s;
                 }});
    k.push_back(integer("ladder", "p2_first_shell", &R::ladder, &LadderSpec::p2_first_shell));
    k.push_back(integer("ladder", "p2_last_shell", &R::ladder, &LadderSpec::p2_last_shell));

    const char* t = "tolerance";
    k.push_back(num(t, "agreement", &R::tolerance, &ToleranceSpec::agreement));
    k.push_back(num(t, "exact_agreement", &R::tolerance, &ToleranceSpec::exact_agreement));
    k.push_back(num(t, "monotone", &R::tolerance, &ToleranceSpec::monotone));
    k.push_back(num(t, "stability", &R::tolerance, &ToleranceSpec::stability));
    k.push_back(num(t, "sandwich", &R::tolerance, &ToleranceSpec::sandwich));
    k.push_back(num(t, "frame", &R::tolerance, &ToleranceSpec::frame));
    k.push_back(num(t, "graph", &R::tolerance, &ToleranceSpec::graph));
    k.push_back(num(t, "euler", &R::tolerance, &ToleranceSpec::euler));
    k.push_back(num(t, "continuity", &R::tolerance, &ToleranceSpec::continuity));
    k.push_back(num(t, "min_slope", &R::tolerance, &ToleranceSpec::min_slope));
    k.push_back(num(t, "ratio_growth", &R::tolerance, &ToleranceSpec::ratio_growth));
    k.push_back(num(t, "order_alpha", &R::tolerance, &ToleranceSpec::order_alpha));
    k.push_back(num(t, "order_snap", &R::tolerance, &ToleranceSpec::order_snap));
    return k;
  }();
  return keys;
}

// Validation failure tied to a key.
struct Invalid {
  std::string key;  // section.name
  std::string msg;
};

void check(bool ok, const std::string& key, const std::string& msg) {
  if (!ok) throw Invalid{key, msg};
}

void check_decreasing(const std::vector<double>& v, const std::string& key) {
  for (double x : v) check(x > 0, key, "radii must be positive");
  for (std::size_t i = 1; i < v.size(); ++i) check(v[i] < v[i - 1], key, "radii must be strictly decreasing");
}

void validate_impl(const RunConfig& c) {
  const auto& names = scenario_names();
  check(std::find(names.begin(), names.end(), c.scenario) != names.end(), "run.scenario",
        "unknown scenario '" + c.scenario + "'");
  check(!c.out.empty(), "run.out", "output directory must not be empty");

  const auto& m = c.modulus;
  check(m.kind == "graph" || m.kind == "zero" || m.kind == "power" || m.kind == "log_power" || m.kind == "table",
        "modulus.kind", "unknown modulus kind '" + m.kind + "'");
  if (m.kind == "power") check(m.exponent > 0 && m.exponent <= 1, "modulus.exponent", "power exponent must lie in (0, 1]");
  if (m.kind == "log_power") check(m.exponent > 1, "modulus.exponent", "log_power exponent must exceed 1");
  check(m.scale >= 0, "modulus.scale", "scale must be nonnegative");
  if (m.kind == "table") {
    check(m.table_r.size() == m.table_v.size() && m.table_r.size() >= 2, "modulus.table_v",
          "table needs matching table_r and table_v with at least two samples");
    for (std::size_t i = 1; i < m.table_r.size(); ++i)
      check(m.table_r[i] > m.table_r[i - 1], "modulus.table_r", "table radii must increase");
  }
  check(m.R > 0, "modulus.R", "R must be positive");
  check(m.beta > 0 && m.beta < 1, "modulus.beta", "beta must lie in (0, 1)");
  check(m.quad_tol > 0, "modulus.quad_tol", "tolerance must be positive");
  check(m.freq_constant >= 0, "modulus.freq_constant", "frequency constant must be nonnegative");

  const auto& d = c.domain;
  check(d.dim >= 2 && d.dim <= 4, "domain.dim", "dimension must be 2, 3 or 4");
  check(d.family == "flat" || d.family == "power", "domain.family", "unknown family '" + d.family + "'");
  check(d.alpha > 0 && d.alpha <= 1, "domain.alpha", "alpha must lie in (0, 1]");
  check(d.c0 >= 0, "domain.c0", "c0 must be nonnegative");
  check(d.x0.empty() || static_cast<int>(d.x0.size()) == d.dim - 1, "domain.x0", "x0 needs dim - 1 coordinates");
  check(d.chart_radius > 0, "domain.chart_radius", "chart radius must be positive");

  const auto& f = c.field;
  check(f.source == "solve" || f.source == "fixture", "field.source", "source must be solve or fixture");
  check(f.fixture == "t" || f.fixture == "t+2xt" || f.fixture == "footnote", "field.fixture",
        "unknown fixture '" + f.fixture + "'");
  if (f.source == "fixture" && f.fixture == "footnote") check(d.dim == 3, "domain.dim", "the footnote fixture lives in d = 3");
  if (f.source == "solve") check(d.dim <= 3, "domain.dim", "the solver supports d = 2, 3");
  check(f.center.empty() || static_cast<int>(f.center.size()) == d.dim, "field.center", "center needs dim coordinates");
  check(f.R > 0, "field.R", "R must be positive");
  check(f.h > 0 && f.h < f.R, "field.h", "h must lie in (0, R)");
  check(f.h_fine > 0 && f.h_fine < f.h, "field.h_fine", "h_fine must be positive and below h");
  check(f.bc == "s" || f.bc == "s+0.5ys", "field.bc", "unknown boundary data '" + f.bc + "'");

  const auto& l = c.ladder;
  check_decreasing(l.frequency, "ladder.frequency");
  check_decreasing(l.blowup, "ladder.blowup");
  check_decreasing(l.bands, "ladder.bands");
  check_decreasing(l.order, "ladder.order");
  check_decreasing(l.continuity, "ladder.continuity");
  for (const auto& [s, r] : l.pairs) check(s > 0 && s < r, "ladder.pairs", "pairs need 0 < s < r");
  check(l.p2_first_shell >= 1 && l.p2_last_shell > l.p2_first_shell && l.p2_last_shell <= 30, "ladder.p2_last_shell",
        "shells need 1 <= first < last <= 30");

  const auto& t = c.tolerance;
  const std::pair<const char*, double> positive[] = {
      {"agreement", t.agreement}, {"exact_agreement", t.exact_agreement}, {"monotone", t.monotone},
      {"stability", t.stability}, {"sandwich", t.sandwich}, {"frame", t.frame}, {"graph", t.graph},
      {"euler", t.euler}, {"continuity", t.continuity}, {"min_slope", t.min_slope}, {"ratio_growth", t.ratio_growth},
      {"order_alpha", t.order_alpha}, {"order_snap", t.order_snap}};
  for (const auto& [name, v] : positive) check(v > 0, std::string("tolerance.") + name, "tolerance must be positive");
  check(t.order_snap < 0.5, "tolerance.order_snap", "snap must be below 0.5");
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"modulus-check", "geometry-check", "solve", "frequency",
                                                 "blowup", "expand", "continuity", "full-verify"};
  return names;
}

ModulusConfig RunConfig::modulus_config() const {
  ModulusConfig m;
  m.R = modulus.R;
  m.beta = modulus.beta;
  m.quad_tol = modulus.quad_tol;
  m.freq_constant = modulus.freq_constant;
  return m;
}

void RunConfig::validate() const {
  try {
    validate_impl(*this);
  } catch (const Invalid& e) {
    auto dot = e.key.find('.');
    throw ConfigError("[" + e.key.substr(0, dot) + "] " + e.key.substr(dot + 1) + ": " + e.msg);
  }
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  RunConfig cfg;
  std::map<std::string, int> seen;  // section.key -> line
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  auto fail = [&](int at, const std::string& msg) { throw ConfigError(source + ":" + std::to_string(at) + ": " + msg); };
  while (std::getline(in, raw)) {
    ++line;
    auto hash = raw.find('#');
    std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      bool known = false;
      for (const auto& k : schema()) known = known || k.section == section;
      if (!known) fail(line, "unknown section [" + section + "]");
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    if (section.empty()) fail(line, "key outside of a section");
    std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    const Key* match = nullptr;
    for (const auto& k : schema())
      if (k.section == section && k.name == key) match = &k;
    if (!match) fail(line, "unknown key '" + key + "' in [" + section + "]");
    std::string full = section + "." + key;
    if (seen.count(full)) fail(line, "duplicate key '" + key + "' (first set on line " + std::to_string(seen[full]) + ")");
    seen[full] = line;
    try {
      match->set(cfg, value);
    } catch (const BadValue& e) {
      fail(line, key + ": " + e.msg);
    }
  }
  try {
    validate_impl(cfg);
  } catch (const Invalid& e) {
    auto it = seen.find(e.key);
    auto dot = e.key.find('.');
    std::string where = "[" + e.key.substr(0, dot) + "] " + e.key.substr(dot + 1) + ": " + e.msg;
    if (it != seen.end()) fail(it->second, where);
    throw ConfigError(source + ": " + where);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path + ": cannot open");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out, section;
  for (const auto& k : schema()) {
    if (k.section != section) {
      out += (section.empty() ? "[" : "\n[") + k.section + "]\n";
      section = k.section;
    }
    out += k.name + " = " + k.get(cfg) + "\n";
  }
  return out;
}

}  // namespace dini
