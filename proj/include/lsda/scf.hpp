#pragma once

#include <string>
#include <vector>

#include "lsda/eigensolve.hpp"
#include "lsda/operator.hpp"
#include "lsda/spin_model.hpp"
#include "lsda/xc.hpp"

namespace lsda {

struct EnergyBreakdown {
  double kinetic = 0.0;
  double hartree = 0.0;
  double v_ext = 0.0;   // integral V rho
  double zeeman = 0.0;  // -mu integral B.m
  double xc = 0.0;
  double total = 0.0;

  double sum_of_parts() const noexcept { return kinetic + hartree + v_ext + zeeman + xc; }
};

/// Which initial densities to try: the unpolarized superposition of Gaussians,
/// the same density with spins along the local field (along +z where B
/// vanishes), or both. default runs the aligned start only when B is non-zero.
enum class Starts { standard, aligned, both };

Starts parse_starts(const std::string& s);
std::string to_string(Starts s);

struct ScfOptions {
  double mix_beta = 0.3;
  double tol_rho = 1e-6;
  double tol_e = 1e-8;
  int max_iter = 300;
  double deg_tol = 1e-6;
  int k_extra = 8;
  Starts starts = Starts::standard;
  EigenOptions eig;
  PoissonOptions poisson;

  friend bool operator==(const ScfOptions&, const ScfOptions&) = default;
};

struct ScfProblem {
  Grid grid;
  ExternalFields ext;
  double lambda = 1.0;
  Mode mode = Mode::full;
  XcFunctional xc = XcFunctional::xalpha();
  ScfOptions opt;
};

/// Fixed ingredients of a problem, sampled once on the grid.
struct ScfSetup {
  Grid grid;
  Mode mode = Mode::full;
  RealField v;
  VectorField b;
  UField u;  // already restricted to the mode; zero in infinity mode
  XcFunctional xc;
  PoissonOptions poisson;
};

ScfSetup prepare(const ScfProblem& problem);

struct Occupation {
  std::vector<double> occupations;
  double fermi = 0.0;
};

/// Aufbau filling of ascending eigenvalues with the frontier remainder shared
/// equally by all levels within deg_tol of the frontier. Throws ConfigError when
/// the computed levels cannot hold lambda.
Occupation occupy(const std::vector<double>& eigenvalues, double lambda, double deg_tol);

EnergyBreakdown total_energy(const OccupiedSet& s, const ScfSetup& setup);
EnergyBreakdown total_energy(const OccupiedSet& s, const SpinDensityField& r, const ScfSetup& setup);

struct IterationRecord {
  int iteration = 0;
  double total = 0.0;
  double delta_rho = 0.0;
  double delta_e = 0.0;
  double fermi = 0.0;
  ColemanDiagnostics coleman;
  int eig_iterations = 0;
};

struct ScfState {
  OccupiedSet occupied;
  SpinDensityField density;
  std::vector<double> orbital_energies;
  double fermi = 0.0;
  EnergyBreakdown energy;
  int iterations = 0;
  bool converged = false;
  bool flipped = false;  // the returned state is the flip of the converged one
  std::string start;
  std::vector<IterationRecord> history;
  std::vector<IterationRecord> other_history;  // iterates of the starts not returned
};

/// Fixed-point iteration with linear mixing of the four R channels. Returns the
/// lower-energy of the converged state and its flip, and the best over the
/// configured starts. Throws SolverError when no start converges.
ScfState scf_solve(const ScfProblem& problem);

/// Single start from the given initial density.
ScfState scf_run(const ScfProblem& problem, const ScfSetup& setup, const SpinDensityField& initial,
                 const std::string& label);

/// Superposition of per-nucleus Gaussians normalized to lambda (box centre when
/// there are no nuclei); unpolarized or aligned with the local field.
SpinDensityField initial_density(const ScfProblem& problem, const ScfSetup& setup, bool aligned);

}  // namespace lsda
