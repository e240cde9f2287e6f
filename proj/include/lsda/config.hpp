#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lsda/scf.hpp"

namespace lsda {

/// Everything a run needs. Written as line-based `key = value` text with
/// optional `[section]` headers; a header prefixes the keys below it
/// (`[scf]` then `tol_rho = 1e-7` is `scf.tol_rho`), and every `[nucleus]`
/// header opens a new nucleus with keys `z` and `position`.
struct RunConfig {
  int grid_n = 0;
  double grid_length = 0.0;
  std::optional<Vec3> grid_origin;  // box centred on the origin when absent
  std::vector<Nucleus> nuclei;
  MagneticFieldSpec field;
  double lambda = 0.0;
  Mode mode = Mode::full;
  std::string xc = "xalpha";
  double c_x = kSlaterDirac;
  double softening = -1.0;  // negative: h/2
  double mu = kBohrMagneton;
  ScfOptions scf;
  std::vector<double> sweep_lambdas{0.5, 1.0};
  double tol_bind = 1e-4;
  std::vector<std::uint64_t> verify_seeds{1, 2, 3};

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  Grid grid() const;
  XcFunctional functional() const;
  ExternalFields external() const;
  ScfProblem problem() const;
};

/// Throws ConfigError naming the line for unknown or duplicate keys, malformed
/// values and sections, and for missing required keys (grid.n, grid.L, lambda).
RunConfig parse_config(const std::string& text);

/// Reads and parses a file; unreadable files are configuration errors.
RunConfig load_config(const std::string& path);

/// Cross-field checks shared by the parser and programmatic callers: positive
/// tolerances, admissible ranges, and no transverse field in collinear mode.
void validate(const RunConfig& c);

/// Text that parses back to an equal RunConfig.
std::string render_config(const RunConfig& c);

}  // namespace lsda
