#include "dini/config.hpp"
#include "dini/frequency.hpp"
#include "dini/scenario.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

enum Exit { kPass = 0, kAssertion = 1, kConfig = 2, kNumeric = 3 };

// Defaults that make each scenario meaningful without a config file.
void apply_scenario_defaults(dini::RunConfig& cfg) {
  if (cfg.scenario == "continuity") {
    cfg.domain.dim = 3;
    cfg.field.source = "fixture";
    cfg.field.fixture = "footnote";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary expansions of harmonic functions on Dini domains: numerical checks"};
  std::string config_path, out, scenario;
  std::optional<std::uint64_t> seed;
  bool verbose = false, print_config = false;
  app.add_option("--config", config_path, "configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out, "output directory (overrides [run] out)");
  app.add_option("--seed", seed, "seed for randomized sweeps (overrides [run] seed)");
  app.add_option("--scenario", scenario, "scenario to run (overrides [run] scenario)");
  app.add_flag("--verbose,-v", verbose, "progress on stderr");
  app.add_flag("--print-config", print_config, "print the effective configuration and exit");
  for (const auto& name : dini::scenario_names())
    app.add_subcommand(name, "run the " + name + " scenario")->fallthrough();
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    dini::RunConfig cfg;
    std::string chosen = scenario;
    if (!app.get_subcommands().empty()) {
      std::string sub = app.get_subcommands().front()->get_name();
      if (!chosen.empty() && chosen != sub)
        throw dini::ConfigError("--scenario " + chosen + " conflicts with subcommand " + sub);
      chosen = sub;
    }
    if (!config_path.empty()) {
      cfg = dini::load_config(config_path);
    } else if (!chosen.empty()) {
      cfg.scenario = chosen;
      apply_scenario_defaults(cfg);
    }
    if (!chosen.empty()) cfg.scenario = chosen;
    if (!out.empty()) cfg.out = out;
    if (seed) cfg.seed = *seed;
    cfg.validate();
    if (print_config) {
      std::cout << dini::serialize_config(cfg);
      return kPass;
    }

    dini::ScenarioResult res = dini::run_scenario(cfg, verbose ? &std::cerr : nullptr);
    for (const auto& c : res.checks.checks())
      std::cout << c.id << (c.pass ? " PASS " : " FAIL ") << c.description << " value=" << dini::CsvTable::number(c.value)
                << " threshold=" << dini::CsvTable::number(c.threshold) << (c.detail.empty() ? "" : " [" + c.detail + "]")
                << "\n";
    std::cout << "reports: " << cfg.out << "\n";
    if (!res.checks.all_pass()) {
      for (const auto& id : res.checks.failures()) std::cerr << "failed: " << id << "\n";
      return kAssertion;
    }
    return kPass;
  } catch (const dini::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const dini::Error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
}
