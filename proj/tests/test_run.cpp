#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "lsda/config.hpp"
#include "lsda/error.hpp"
#include "lsda/output.hpp"
#include "lsda/run.hpp"

using namespace lsda;
namespace fs = std::filesystem;

namespace {

const char* kHydrogen = R"(lambda = 1
mode = noninteracting
[grid]
n = 10
L = 10
[nucleus]
z = 1
position = 0 0 0
)";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lsda_test_run_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(LSDA_CLI_PATH) + " " + args + " 2>/dev/null >/dev/null").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const Artifact& find(const RunOutcome& o, const std::string& name) {
  for (const auto& a : o.artifacts)
    if (a.name == name) return a;
  throw std::runtime_error("missing artifact " + name);
}

}  // namespace

TEST_CASE("solve artifacts are byte-identical across runs") {
  RunConfig c = parse_config(kHydrogen);
  c.mode = Mode::full;
  c.lambda = 0.5;
  c.grid_n = 8;
  const RunOutcome a = run(Command::solve, c);
  const RunOutcome b = run(Command::solve, c);
  REQUIRE(a.artifacts.size() == b.artifacts.size());
  for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
    CHECK(a.artifacts[i].name == b.artifacts[i].name);
    CHECK(a.artifacts[i].content == b.artifacts[i].content);
  }
  CHECK_FALSE(a.failed);
}

TEST_CASE("noninteracting hydrogen solve reports the lowest eigenvalue as the total") {
  const RunOutcome o = run(Command::solve, parse_config(kHydrogen));
  const std::string energies = find(o, "energies.csv").content;
  const std::string orbitals = find(o, "orbitals.csv").content;
  CHECK(energies.rfind("part,value_hartree\n", 0) == 0);
  const auto total_pos = energies.find("total,");
  REQUIRE(total_pos != std::string::npos);
  const double total = std::stod(energies.substr(total_pos + 6));
  const auto first = orbitals.find('\n') + 1;
  const auto comma = orbitals.find(',', first);
  const double lowest = std::stod(orbitals.substr(comma + 1));
  CHECK(total == doctest::Approx(lowest).epsilon(1e-10));
  CHECK(find(o, "density.dat").content.rfind("# dims 10 10 10\n", 0) == 0);
  CHECK(parse_config(find(o, "config_used.txt").content) == parse_config(kHydrogen));
}

TEST_CASE("sweep writes one row per requested lambda") {
  RunConfig c = parse_config(kHydrogen);
  c.mode = Mode::full;
  c.grid_n = 8;
  c.grid_length = 8.0;
  const RunOutcome o = run(Command::sweep, c);
  const std::string csv = find(o, "sweep.csv").content;
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.find("\n5.0000000000000000e-01,") != std::string::npos);
  CHECK(csv.find("\n1.0000000000000000e+00,") != std::string::npos);
}

TEST_CASE("fliptest reports margins at rounding level") {
  RunConfig c = parse_config(kHydrogen);
  c.grid_n = 6;
  const RunOutcome o = run(Command::fliptest, c);
  CHECK_FALSE(o.failed);
  const std::string csv = find(o, "fliptest.csv").content;
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("run validates before doing any work") {
  RunConfig c = parse_config(kHydrogen);
  c.scf.mix_beta = 2.0;
  CHECK_THROWS_AS(run(Command::solve, c), ConfigError);
  CHECK(parse_command("verify") == Command::verify);
  CHECK_THROWS_AS(parse_command("explode"), ConfigError);
}

TEST_CASE("command line: success writes artifacts, invalid config exits 2 without outputs") {
  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  {
    std::ofstream(dir / "good.conf") << kHydrogen;
    std::ofstream(dir / "bad.conf") << kHydrogen << "warp = 9\n";
  }
  CHECK(run_cli("solve --config " + (dir / "good.conf").string() + " --out " + (dir / "out1").string()) == 0);
  CHECK(run_cli("solve --config " + (dir / "good.conf").string() + " --out " + (dir / "out2").string()) == 0);
  for (const char* name : {"energies.csv", "density.dat", "orbitals.csv", "history.csv", "solve_report.txt"}) {
    CHECK(fs::exists(dir / "out1" / name));
    CHECK(slurp(dir / "out1" / name) == slurp(dir / "out2" / name));
  }
  CHECK(run_cli("solve --config " + (dir / "bad.conf").string() + " --out " + (dir / "bad_out").string()) == 2);
  CHECK_FALSE(fs::exists(dir / "bad_out"));
  CHECK(run_cli("solve --config " + (dir / "missing.conf").string() + " --out " + (dir / "none").string()) == 2);
  CHECK_FALSE(fs::exists(dir / "none"));
  CHECK(run_cli("fliptest --config " + (dir / "good.conf").string() + " --out " + (dir / "flip").string()) == 0);
  CHECK(fs::exists(dir / "flip" / "fliptest.csv"));
  fs::remove_all(dir.parent_path());
}
