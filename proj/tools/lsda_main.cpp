#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lsda/error.hpp"
#include "lsda/run.hpp"

namespace {

// One line on stderr: error kind=<config|solver|numeric|internal> exit=<n> message="<text>"
int fail(const char* kind, int code, const std::string& message) {
  std::string escaped;
  for (char c : message) {
    if (c == '"' || c == '\\') escaped += '\\';
    escaped += c == '\n' ? ' ' : c;
  }
  std::cerr << "error kind=" << kind << " exit=" << code << " message=\"" << escaped << "\"\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Real-space spin-polarized Kohn-Sham (LSDA) solver and verification harness"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  for (const char* name : {"solve", "sweep", "verify", "fliptest"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "eigensolver seed, overrides eig.seed");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("config", 2, e.what());
  }

  try {
    const lsda::Command command = lsda::parse_command(app.get_subcommands().front()->get_name());
    lsda::RunConfig config = lsda::load_config(config_path);
    if (seed) config.scf.eig.seed = *seed;
    const lsda::RunOutcome outcome = lsda::run(command, config);
    lsda::write_artifacts(out_dir, outcome.artifacts);
    std::cout << lsda::to_string(command) << ": " << outcome.summary << "\n";
    return outcome.failed ? 1 : 0;
  } catch (const lsda::ConfigError& e) {
    return fail("config", 2, e.what());
  } catch (const lsda::SolverError& e) {
    return fail("solver", 1, e.what());
  } catch (const lsda::NumericError& e) {
    return fail("numeric", 1, e.what());
  } catch (const std::exception& e) {
    return fail("internal", 1, e.what());
  }
}
