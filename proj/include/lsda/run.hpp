#pragma once

#include <string>
#include <vector>

#include "lsda/config.hpp"

namespace lsda {

enum class Command { solve, sweep, verify, fliptest };

Command parse_command(const std::string& s);
std::string to_string(Command c);

struct Artifact {
  std::string name;
  std::string content;
};

struct RunOutcome {
  std::vector<Artifact> artifacts;
  bool failed = false;  // an exact check failed
  std::string summary;
};

/// Runs one subcommand and returns its output files in memory. Configuration
/// problems throw ConfigError and solver failures SolverError, before anything
/// is written.
RunOutcome run(Command command, const RunConfig& config);

/// Creates dir if needed and writes every artifact into it.
void write_artifacts(const std::string& dir, const std::vector<Artifact>& artifacts);

}  // namespace lsda
