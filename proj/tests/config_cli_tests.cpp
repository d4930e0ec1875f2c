#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "urn/config.hpp"
#include "urn/report_io.hpp"
#include "urn/scenarios.hpp"

using namespace urn;
namespace fs = std::filesystem;

namespace {

const char* kCoordinationCfg =
    "[model]\n"
    "type = replicator\n"
    "k = 2\n"
    "R = table 1:0.025 | table 1:0.0025 ; table 1:0.0025 | table 1:0.025\n"
    "\n"
    "[simulation]\n"
    "z0 = 20 20\n"
    "steps = 500\n"
    "seed = 1\n"
    "stride = 10\n"
    "\n"
    "[output]\n"
    "dir = out\n";

fs::path temp_dir() {
  fs::path dir = fs::temp_directory_path() / ("urnsim_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args, const fs::path& dir, std::string* output = nullptr) {
  fs::path log = dir / "cli_output.txt";
  std::string cmd = std::string(URNSIM_BIN) + " " + args + " > " + log.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  if (output != nullptr) *output = read_text_file(log.string());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config parsing: sections, comments and errors") {
  ConfigFile f = ConfigFile::parse_string(
      "# header comment\n"
      "[model]\n"
      "type = birth-death   # trailing comment\n"
      "k = 1\n"
      "up = 0.6\n"
      "down = 0.4\n",
      "inline");
  CHECK(f.has_section("model"));
  CHECK(f.section("model").at("type").value == "birth-death");
  CHECK(f.section("model").at("up").line == 5);

  CHECK_THROWS_AS(ConfigFile::parse_string("key = 1\n", "x"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse_string("[a\n", "x"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse_string("[a]\nk = 1\nk = 2\n", "x"), ConfigError);
}

TEST_CASE("unknown sections and keys are rejected with line anchors") {
  try {
    RunConfig::resolve(ConfigFile::parse_string("[model]\ntype = birth-death\nk = 1\nup = 0.5\n"
                                                "down = 0.1\nbogus = 3\n",
                                                "cfg"));
    FAIL("expected rejection");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("bogus") != std::string::npos);
    CHECK(msg.find("cfg:6") != std::string::npos);
  }
  CHECK_THROWS_AS(
      RunConfig::resolve(ConfigFile::parse_string("[mystery]\nx = 1\n", "cfg")),
      ConfigError);
}

TEST_CASE("model resolution covers every kind") {
  RunConfig rep = RunConfig::resolve(ConfigFile::parse_string(kCoordinationCfg, "coord"));
  REQUIRE(rep.has_model);
  CHECK(rep.model.kind == ModelKind::Replicator);
  CHECK(rep.model.dimension == 2);
  TransitionLaw law = build_law(rep.model);
  CHECK(law.jump_bound == 2);

  RunConfig fert = RunConfig::resolve(ConfigFile::parse_string(
      "[model]\ntype = fertility\nk = 2\ngamma = 1.1 1.1 ; 1.1 1.1\n"
      "[simulation]\nz0 = 0 20 ; 20 0\nsteps = 10\n",
      "fert"));
  CHECK(fert.model.kind == ModelKind::Fertility);
  CHECK(fert.model.dimension == 4);
  CHECK(total_count(fert.sim.z0) == 40);

  RunConfig mut = RunConfig::resolve(ConfigFile::parse_string(
      "[model]\ntype = fertility-mutation\nk = 2\ngamma = 1.1 1.1 ; 1.1 1.1\n"
      "mu_11_12 = 0.01\nmu_12_11 = 0.02\n",
      "mut"));
  REQUIRE(mut.model.mutation.has_value());
  CHECK(mut.model.mutation->rows[0][1] == doctest::Approx(0.01));
  CHECK(mut.model.mutation->rows[0][0] == doctest::Approx(0.99));
  CHECK(mut.model.mutation->rows[1][0] == doctest::Approx(0.02));

  CHECK_THROWS_AS(RunConfig::resolve(ConfigFile::parse_string(
                      "[model]\ntype = warp-drive\n", "bad")),
                  ConfigError);
  CHECK_THROWS_AS(RunConfig::resolve(ConfigFile::parse_string(
                      "[model]\ntype = fertility\nk = 2\ngamma = 1.1 1.1 ; 1.1 1.1\n"
                      "[simulation]\nz0 = 1 20 ; 20 0\nsteps = 10\n",
                      "badstate")),
                  ConfigError);
}

TEST_CASE("exactly one stop condition is required") {
  CHECK_THROWS_AS(RunConfig::resolve(ConfigFile::parse_string(
                      "[model]\ntype = birth-death\nk = 1\nup = 0.5\ndown = 0.1\n"
                      "[simulation]\nz0 = 5\nsteps = 10\nclock = 5\n",
                      "two")),
                  ConfigError);
  CHECK_THROWS_AS(RunConfig::resolve(ConfigFile::parse_string(
                      "[model]\ntype = birth-death\nk = 1\nup = 0.5\ndown = 0.1\n"
                      "[simulation]\nz0 = 5\n",
                      "none")),
                  ConfigError);
}

TEST_CASE("the resolved echo reparses to the same resolution") {
  RunConfig rc = RunConfig::resolve(ConfigFile::parse_string(kCoordinationCfg, "coord"));
  std::string echoed = rc.echo();
  RunConfig back = RunConfig::resolve(ConfigFile::parse_string(echoed, "echo"));
  CHECK(back.echo() == echoed);
  CHECK(back.sim.seed == rc.sim.seed);
  CHECK(back.sim.z0 == rc.sim.z0);
}

TEST_CASE("every bundled preset text resolves") {
  for (const auto& [name, text] : preset_configs()) {
    RunConfig rc = RunConfig::resolve(ConfigFile::parse_string(text, name));
    REQUIRE(rc.preset.has_value());
    CHECK(*rc.preset == name);
  }
}

TEST_CASE("preset files on disk match the embedded texts") {
  for (const auto& [name, text] : preset_configs()) {
    fs::path file = fs::path(URNSIM_PRESET_DIR) / (name + ".cfg");
    REQUIRE_MESSAGE(fs::exists(file), file.string());
    CHECK(read_text_file(file.string()) == text);
  }
}

TEST_CASE("manifest hashes are stable") {
  CHECK(fnv1a64("") == 14695981039346656037ull);
  CHECK(fnv1a64("a") != fnv1a64("b"));
}

TEST_CASE("cli: simulate is byte-reproducible and summarizes the run") {
  fs::path dir = temp_dir();
  write_text_file((dir / "run.cfg").string(), kCoordinationCfg);
  std::string cfg = (dir / "run.cfg").string();

  int code1 = run_cli("simulate --config " + cfg + " --out " + (dir / "a").string(), dir);
  int code2 = run_cli("simulate --config " + cfg + " --out " + (dir / "b").string(), dir);
  CHECK(code1 == 0);
  CHECK(code2 == 0);
  CHECK(read_text_file((dir / "a" / "trajectory.ndjson").string()) ==
        read_text_file((dir / "b" / "trajectory.ndjson").string()));
  CHECK(fs::exists(dir / "a" / "summary.json"));
  CHECK(fs::exists(dir / "a" / "manifest.json"));
  CHECK(fs::exists(dir / "a" / "resolved.cfg"));

  // feeding the echoed config back in reproduces the run bytes
  int code3 = run_cli("simulate --config " + (dir / "a" / "resolved.cfg").string() + " --out " +
                          (dir / "c").string(),
                      dir);
  CHECK(code3 == 0);
  CHECK(read_text_file((dir / "a" / "trajectory.ndjson").string()) ==
        read_text_file((dir / "c" / "trajectory.ndjson").string()));
  fs::remove_all(dir);
}

TEST_CASE("cli: pure-death run reports extinction") {
  fs::path dir = temp_dir();
  write_text_file((dir / "death.cfg").string(),
                  "[model]\ntype = birth-death\nk = 1\nup = 0\ndown = 1\n"
                  "[simulation]\nz0 = 5\nuntil_extinct = true\nseed = 2\n");
  std::string out;
  int code = run_cli("simulate --config " + (dir / "death.cfg").string() + " --out " +
                         (dir / "o").string(),
                     dir, &out);
  CHECK(code == 0);
  CHECK(out.find("outcome=extinct") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cli: malformed configs exit with code 2 and a named section") {
  fs::path dir = temp_dir();
  write_text_file((dir / "nomodel.cfg").string(), "[simulation]\nz0 = 5\nsteps = 10\n");
  std::string out;
  int code = run_cli("simulate --config " + (dir / "nomodel.cfg").string(), dir, &out);
  CHECK(code == 2);
  CHECK(out.find("[model]") != std::string::npos);

  write_text_file((dir / "badkey.cfg").string(),
                  "[model]\ntype = birth-death\nk = 1\nup = 0.5\ndown = 0.1\nwhat = 1\n");
  code = run_cli("simulate --config " + (dir / "badkey.cfg").string(), dir, &out);
  CHECK(code == 2);
  CHECK(out.find("what") != std::string::npos);
  CHECK(out.find(":6") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cli: field writes equilibria and a flow path") {
  fs::path dir = temp_dir();
  write_text_file((dir / "run.cfg").string(), kCoordinationCfg);
  std::string out;
  int code = run_cli("field --config " + (dir / "run.cfg").string() + " --out " +
                         (dir / "f").string() + " --flow \"0.6 0.4\" --T 5",
                     dir, &out);
  CHECK(code == 0);
  std::string eq = read_text_file((dir / "f" / "equilibria.json").string());
  CHECK(eq.find("linearly unstable") != std::string::npos);
  CHECK(eq.find("linearly stable") != std::string::npos);
  CHECK(fs::exists(dir / "f" / "flow.csv"));
  fs::remove_all(dir);
}

TEST_CASE("cli: montecarlo reruns are byte-identical") {
  fs::path dir = temp_dir();
  write_text_file((dir / "bd.cfg").string(),
                  "[model]\ntype = birth-death\nk = 1\nup = 0.6\ndown = 0.4\n"
                  "[simulation]\nz0 = 10\nsteps = 2000\nseed = 5\nstride = 0\n"
                  "[ensemble]\nreplicates = 100\nthreshold = 0.1\n");
  int c1 = run_cli("montecarlo --config " + (dir / "bd.cfg").string() + " --out " +
                       (dir / "m1").string() + " --threads 1",
                   dir);
  int c2 = run_cli("montecarlo --config " + (dir / "bd.cfg").string() + " --out " +
                       (dir / "m2").string() + " --threads 4",
                   dir);
  CHECK(c1 == 0);
  CHECK(c2 == 0);
  CHECK(read_text_file((dir / "m1" / "ensemble.json").string()) ==
        read_text_file((dir / "m2" / "ensemble.json").string()));
  CHECK(read_text_file((dir / "m1" / "replicates.csv").string()) ==
        read_text_file((dir / "m2" / "replicates.csv").string()));
  fs::remove_all(dir);
}

TEST_CASE("cli: verify runs the fast identity preset") {
  fs::path dir = temp_dir();
  std::string out;
  int code = run_cli("verify --preset keystone-replicator-field --out " + (dir / "v").string(),
                     dir, &out);
  CHECK(code == 0);
  CHECK(out.find("PASS") != std::string::npos);
  CHECK(fs::exists(dir / "v" / "verify.json"));
  fs::remove_all(dir);
}

TEST_CASE("cli: unknown preset fails with a config error") {
  fs::path dir = temp_dir();
  std::string out;
  int code = run_cli("verify --preset not-a-preset", dir, &out);
  CHECK(code == 2);
  fs::remove_all(dir);
}
