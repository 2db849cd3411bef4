#include "dini/config.hpp"
#include "dini/report.hpp"
#include "dini/scenario.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dini;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("dini_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

int run_cli(const std::string& args) {
  int status = std::system((std::string(DINI_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config round trip") {
  RunConfig a;
  CHECK(parse_config(serialize_config(a)) == a);
  a.scenario = "frequency";
  a.seed = 18446744073709551615ULL;
  a.domain.c0 = 0.1 / 3;
  a.domain.x0 = {0.1};
  a.field.h = 1.0 / 7;
  a.field.h_fine = 1.0 / 13;
  a.ladder.frequency = {0.3, 0.2, 1e-5};
  a.ladder.pairs = {{1.0 / 3, 0.5}};
  a.modulus.kind = "table";
  a.modulus.table_r = {0, 0.5, 1};
  a.modulus.table_v = {0, 0.1, 0.3};
  a.tolerance.agreement = 1e-300;
  RunConfig b = parse_config(serialize_config(a));
  CHECK(b == a);
  CHECK(serialize_config(b) == serialize_config(a));
}

TEST_CASE("config parsing") {
  RunConfig c = parse_config("# comment\n[run]\nscenario = solve  # trailing\n[field]\nh = 1/128\n\n[ladder]\npairs = 0.1:0.2, 0.2:0.4\n");
  CHECK(c.scenario == "solve");
  CHECK(c.field.h == 1.0 / 128);
  REQUIRE(c.ladder.pairs.size() == 2);
  CHECK(c.ladder.pairs[1].second == 0.4);
  CHECK(c.ladder.blowup == RunConfig{}.ladder.blowup);
}

TEST_CASE("config errors carry the line") {
  CHECK(error_of("[run]\nscenario = solve\n[field]\nh = abc\n") == "cfg:4: h: expected a number, got 'abc'");
  CHECK(error_of("[run]\nbogus = 1\n").find("cfg:2: unknown key 'bogus'") == 0);
  CHECK(error_of("[nope]\n").find("cfg:1: unknown section") == 0);
  CHECK(error_of("[run]\nseed = 1\nseed = 2\n").find("cfg:3: duplicate key") == 0);
  CHECK(error_of("scenario = solve\n").find("cfg:1: key outside") == 0);
  CHECK(error_of("[run]\nseed\n").find("cfg:2: expected key = value") == 0);
  CHECK(error_of("[run]\nseed = -4\n").find("cfg:2:") == 0);
  // invariants point at the key that breaks them
  CHECK(error_of("[run]\nseed = 3\n[ladder]\n\nblowup = 0.1, 0.1\n") ==
        "cfg:5: [ladder] blowup: radii must be strictly decreasing");
  CHECK(error_of("[tolerance]\nmonotone = 0\n").find("cfg:2: [tolerance] monotone") == 0);
  CHECK(error_of("[run]\nscenario = dance\n").find("cfg:2: [run] scenario") == 0);
  CHECK(error_of("[field]\nh = 1/0\n").find("division by zero") != std::string::npos);
  RunConfig bad;
  bad.modulus.beta = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("csv and check reports") {
  CsvTable t({"a", "b"});
  t.row({0.1, 1.0 / 3});
  t.row(std::vector<std::string>{"x,y", "q\"z"});
  CHECK(t.str() == "a,b\n0.10000000000000001,0.33333333333333331\n\"x,y\",\"q\"\"z\"\n");
  CHECK_THROWS_AS(t.row(std::vector<double>{1.0}), ContractError);
  CHECK(CsvTable::number(std::numeric_limits<double>::infinity()) == "inf");
  CheckList checks;
  checks.at_most("X-ONE", "first", 1, 2);
  checks.at_least("X-TWO", "second", 1, 2);
  CHECK_FALSE(checks.all_pass());
  CHECK(checks.failures() == std::vector<std::string>{"X-TWO"});
  CHECK(checks.json()[1]["pass"] == false);
}

TEST_CASE("modulus-check on the zero modulus writes an all-zero table") {
  RunConfig c;
  c.scenario = "modulus-check";
  c.modulus.kind = "zero";
  c.out = scratch("zero").string();
  ScenarioResult r = run_scenario(c);
  CHECK(r.checks.all_pass());
  std::istringstream csv(slurp(fs::path(c.out) / "modulus.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "r,theta,theta_hat,theta_tilde,theta_sharp,theta_ring,tail_decay");
  int rows = 0;
  while (std::getline(csv, line)) {
    CHECK(line.substr(line.find(',')) == ",0,0,0,0,0,0");
    ++rows;
  }
  CHECK(rows == static_cast<int>(c.ladder.frequency.size()));
}

TEST_CASE("frequency scenario reports order 2 for the footnote field") {
  RunConfig c;
  c.scenario = "frequency";
  c.domain.dim = 3;
  c.field.source = "fixture";
  c.field.fixture = "footnote";
  c.out = scratch("footnote").string();
  ScenarioResult r = run_scenario(c);
  CHECK(r.checks.all_pass());
  auto summary = Json::parse(slurp(fs::path(c.out) / "summary.json"));
  CHECK(summary["results"]["N"] == 2);
  CHECK(summary["pass"] == true);
  std::string head = slurp(fs::path(c.out) / "frequency.csv").substr(0, 31);
  CHECK(head == "r,H,D,N,N_modified,band_lo,band");
}

TEST_CASE("reports are byte-identical across runs and seeds matter") {
  RunConfig c;
  c.scenario = "geometry-check";
  c.samples = 200;
  c.seed = 42;
  c.out = scratch("geo_a").string();
  run_scenario(c);
  std::string a = slurp(fs::path(c.out) / "geometry.csv"), sa = slurp(fs::path(c.out) / "summary.json");
  c.out = scratch("geo_b").string();
  run_scenario(c);
  CHECK(slurp(fs::path(c.out) / "geometry.csv") == a);
  CHECK(slurp(fs::path(c.out) / "summary.json") == sa);
  c.seed = 43;
  c.out = scratch("geo_c").string();
  run_scenario(c);
  CHECK(slurp(fs::path(c.out) / "geometry.csv") != a);
}

TEST_CASE("blow-up and expansion on the exact fixture t + 2xt") {
  RunConfig c;
  c.field.source = "fixture";
  c.field.fixture = "t+2xt";
  c.modulus.kind = "zero";
  c.scenario = "expand";
  c.out = scratch("expand").string();
  ScenarioResult r = run_scenario(c);
  CHECK(r.checks.all_pass());
  auto summary = Json::parse(slurp(fs::path(c.out) / "summary.json"));
  CHECK(summary["results"]["N"] == 1);
  CHECK(summary["results"]["route_distance"].get<double>() <= 1e-6);
  c.scenario = "blowup";
  c.out = scratch("blowup").string();
  r = run_scenario(c);
  CHECK(r.checks.all_pass());
  CHECK(slurp(fs::path(c.out) / "blowup.csv").rfind("r,epsilon,theta_tilde,ratio\n", 0) == 0);
}

TEST_CASE("fixture centers off the boundary are rejected for tangent analysis") {
  RunConfig c;
  c.field.source = "fixture";
  c.field.fixture = "t";
  c.field.center = {0, 0.5};
  c.scenario = "blowup";
  c.out = scratch("offcenter").string();
  CHECK_THROWS_AS(run_scenario(c), ConfigError);
}

TEST_CASE("cli exit codes") {
  fs::path dir = scratch("exit");
  std::ofstream(dir / "zero.ini") << "[run]\nscenario = modulus-check\n[modulus]\nkind = zero\n";
  std::ofstream(dir / "bad.ini") << "[field]\nh = 2\n";
  std::ofstream(dir / "fail.ini") << "[run]\nscenario = geometry-check\nsamples = 20\n[tolerance]\ngraph = 1e-300\nframe = 1e-300\n";
  std::ofstream(dir / "numeric.ini") << "[run]\nscenario = modulus-check\n[modulus]\nkind = table\ntable_r = 0, 1\ntable_v = 0.1, 0.2\n";
  std::string out = " --out " + (dir / "out").string();
  CHECK(run_cli("--config " + (dir / "zero.ini").string() + out) == 0);
  CHECK(run_cli("--config " + (dir / "bad.ini").string() + out) == 2);
  CHECK(run_cli("--scenario nonsense" + out) == 2);
  CHECK(run_cli("--config " + (dir / "fail.ini").string() + out) == 1);
  CHECK(run_cli("--config " + (dir / "numeric.ini").string() + out) == 3);
  CHECK(run_cli("continuity" + out) == 0);
}
