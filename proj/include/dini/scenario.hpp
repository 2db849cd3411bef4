#pragma once

#include "dini/config.hpp"
#include "dini/expansion.hpp"
#include "dini/field.hpp"
#include "dini/geometry.hpp"
#include "dini/report.hpp"
#include "dini/solver.hpp"

#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace dini {

// The field a scenario works on, in both coordinate systems.
struct Problem {
  GraphDomain domain;
  std::optional<FlattenChart> chart;
  Modulus theta;  // modulus used by frequency and error bands
  ModulusConfig mcfg;
  bool solved = false;
  Polynomial fixture;                  // set for fixtures
  std::shared_ptr<const Field> v;      // flattened coordinates centred at X0, defined on the full ball
  std::shared_ptr<const Field> u;      // original coordinates, zero outside the domain
  Vec X0;
  Mat O;
  SolveStats stats;
  double h = 0;

  int dim() const { return domain.dim(); }
};

Modulus modulus_from_spec(const ModulusSpec& spec, const GraphDomain& domain);
GraphDomain domain_from_spec(const DomainSpec& spec);
// Boundary data by name, in flattened coordinates.
PointFn boundary_data(const std::string& name, int d);
Polynomial fixture_polynomial(const std::string& name, int d);
// Solves when the field source is `solve` (grid step h), otherwise builds the fixture.
Problem build_problem(const RunConfig& cfg, double h);
ExpansionOptions expansion_options(const RunConfig& cfg);

struct ScenarioResult {
  CheckList checks;
  std::vector<std::string> files;  // written under cfg.out
};

// Runs cfg.scenario and writes its reports plus checks.csv and summary.json under cfg.out.
// Numeric failures propagate as exceptions; failed assertions are recorded in the checks.
ScenarioResult run_scenario(const RunConfig& cfg, std::ostream* log = nullptr);

}  // namespace dini
