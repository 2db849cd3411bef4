#pragma once

#include "dini/modulus.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace dini {

// Text format: `[section]` headers, `key = value` lines, `#` comments. Lists are
// comma separated; radius pairs are written `s:r`. Numbers accept `a/b`.
struct ModulusSpec {
  std::string kind = "graph";  // graph (from the domain) | zero | power | log_power | table
  double exponent = 0.5;
  double scale = 1.0;
  std::vector<double> table_r, table_v;
  double R = 1.0;
  double beta = 0.5;
  double quad_tol = 1e-12;
  double freq_constant = 1.0;
  bool operator==(const ModulusSpec&) const = default;
};

struct DomainSpec {
  int dim = 2;
  std::string family = "power";  // flat | power
  double c0 = 0.02;              // phi(x) = c0 |x|^{1 + alpha}
  double alpha = 0.5;
  std::vector<double> x0;        // chart center (d - 1 coordinates); empty means 0
  double chart_radius = 1.0;
  bool operator==(const DomainSpec&) const = default;
};

struct FieldSpec {
  std::string source = "solve";  // solve | fixture
  std::string fixture = "footnote";  // t | t+2xt | footnote
  std::vector<double> center;    // X0 for fixtures; empty means 0
  double R = 1.0;
  double h = 1.0 / 256;
  double h_fine = 1.0 / 512;     // refinement used by the constant-stability check
  std::string bc = "s+0.5ys";    // s | s+0.5ys
  bool operator==(const FieldSpec&) const = default;
};

struct LadderSpec {
  std::vector<double> frequency = {0.125, 0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625, 0.001953125};
  std::vector<double> blowup = {0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
  std::vector<double> bands = {0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
  std::vector<double> order = {0.008, 0.004, 0.002, 0.001};
  std::vector<double> continuity = {0.5, 0.25, 0.125, 0.0625};
  std::vector<std::pair<double, double>> pairs = {{0.015625, 0.03125}, {0.03125, 0.0625},  {0.015625, 0.0625},
                                                  {0.0078125, 0.03125}, {0.0078125, 0.015625}, {0.00390625, 0.015625}};
  int p2_first_shell = 3;
  int p2_last_shell = 10;
  bool operator==(const LadderSpec&) const = default;
};

struct ToleranceSpec {
  double agreement = 5e-2;
  double exact_agreement = 1e-6;
  double monotone = 1e-2;
  double stability = 0.5;
  double sandwich = 1e-8;
  double frame = 1e-12;
  double graph = 1e-10;
  double euler = 1e-3;
  double continuity = 1e-3;
  double min_slope = 0.35;
  double ratio_growth = 2.0;
  double order_alpha = 0.25;
  double order_snap = 0.3;
  bool operator==(const ToleranceSpec&) const = default;
};

struct RunConfig {
  std::string scenario = "full-verify";
  std::uint64_t seed = 1;
  std::string out = "out";
  int samples = 1000;  // randomized sweep size
  ModulusSpec modulus;
  DomainSpec domain;
  FieldSpec field;
  LadderSpec ladder;
  ToleranceSpec tolerance;
  bool operator==(const RunConfig&) const = default;

  ModulusConfig modulus_config() const;
  // Throws ConfigError naming the offending key.
  void validate() const;
};

const std::vector<std::string>& scenario_names();

// `source` prefixes error messages (`source:line: ...`).
RunConfig parse_config(const std::string& text, const std::string& source = "config");
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

}  // namespace dini
