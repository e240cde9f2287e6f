#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lsda/scf.hpp"

namespace lsda {

/// Exact checks hold to rounding; soft checks depend on solver tolerances and
/// discretization, and a miss is recorded rather than treated as an error.
enum class CheckClass { exact, soft };
enum class Verdict { pass, fail, soft_fail, not_evaluated };

std::string to_string(CheckClass c);
std::string to_string(Verdict v);

/// value <= threshold passes.
struct CheckResult {
  std::string name;
  CheckClass kind = CheckClass::exact;
  double value = 0.0;
  double threshold = 0.0;
  Verdict verdict = Verdict::not_evaluated;
  std::string detail;
};

CheckResult make_check(std::string name, CheckClass kind, double value, double threshold, std::string detail = {});

/// Orthonormalized random complex spinors with occupations drawn from [0, 1].
OccupiedSet random_occupied_set(const Grid& g, int count, std::uint64_t seed);

/// Independent uniform components in [-amplitude, amplitude] at every node.
VectorField random_vector_field(const Grid& g, std::uint64_t seed, double amplitude = 1.0);

/// Spinors built from normalized Gaussians of width `width` at distinct centres
/// near the box centre, orthonormalized; occupations 1 then 0.5.
OccupiedSet gaussian_mixture_set(const Grid& g, int count, double width, std::uint64_t seed);

/// |E_ext(gamma) + E_ext(flip gamma) - 2 integral V rho| / (1 + |integral V rho|).
double check_flip_identity(const OccupiedSet& s, const UField& u);

struct PointwiseBounds {
  double offdiag_excess = 0.0;  // max |rho^{ab}| - rho
  double minus_negative = 0.0;  // max -rho^-
  double plus_excess = 0.0;     // max rho^+ - rho

  double worst() const noexcept;
};

PointwiseBounds check_pointwise_bounds(const SpinDensityField& r);

struct HoffmanOstenhof {
  double gradient_up = 0.0;   // integral |grad sqrt(rho^{uu})|^2
  double kinetic_up = 0.0;    // Tr(-Delta gamma^{uu})
  double gradient_down = 0.0;
  double kinetic_down = 0.0;

  /// max over channels of gradient - kinetic (1 + slack); <= 0 passes.
  double margin(double slack = 1e-3) const noexcept;
};

HoffmanOstenhof check_hoffman_ostenhof(const OccupiedSet& s);

/// Exact identities evaluated on one random occupied set and random field.
struct ExactIdentities {
  std::uint64_t seed = 0;
  double flip_zeeman = 0.0;        // check_flip_identity
  double decomposition = 0.0;      // |tr[UR] - (V rho - mu B.m)| relative
  double pointwise = 0.0;          // PointwiseBounds::worst
  double rho_pm_vs_dense = 0.0;    // max |rho+- - eigenvalues of the 2x2 matrix|, relative to max rho
  double flip_kinetic = 0.0;       // relative change of Tr(-Delta gamma) under flip
  double flip_density = 0.0;       // max |rho(flip) - rho|
  double flip_magnetization = 0.0; // max |m(flip) + m|
  double hermiticity = 0.0;        // |<a, H b> - conj <b, H a>| / (|a| |H b|) for the full mean-field H

  double worst() const noexcept;
};

ExactIdentities exact_identities(const Grid& g, const RealField& v, double mu, std::uint64_t seed);

/// Terms of the rank-one trial energy for a normalized orbital phi with
/// |phi|^2 a centred Gaussian of standard deviations s.
struct TrialCoefficients {
  double kinetic = 0.0;   // 1/2 integral |grad phi|^2
  double hartree = 0.0;   // J(|phi|^2)
  double power43 = 0.0;   // integral |phi|^{8/3}
};

TrialCoefficients gaussian_trial_coefficients(const Vec3& s);

/// Same terms evaluated on a grid from the sampled orbital.
TrialCoefficients grid_trial_coefficients(const Grid& g, const Vec3& s);

/// E(gamma) for gamma = lambda |phi_sigma><phi_sigma| in the up channel with no
/// external field: lambda sigma^2 T + lambda^2 sigma J + sigma E_xc(lambda |phi|^2, 0).
/// Only the Xalpha closed form (or no xc) is supported.
double trial_energy(double lambda, double sigma, const TrialCoefficients& c, const XcFunctional& xc);

struct ScalingProfileResult {
  double aspect = 1.0;  // prolate ratio of the Gaussian widths, unit volume
  Vec3 widths{1.0, 1.0, 1.0};
  TrialCoefficients coefficients;
  std::vector<double> energies;  // one per sigma
  double min_energy = 0.0;
  double argmin_sigma = 0.0;
};

struct ScalingGridCheck {
  int n = 0;
  double length = 0.0;
  double kinetic_rel = 0.0;
  double hartree_rel = 0.0;
  double power43_rel = 0.0;
  double worst() const noexcept;
};

struct ScalingTrialReport {
  double lambda = 0.0;
  std::vector<double> sigmas;
  std::vector<ScalingProfileResult> profiles;
  double min_energy = 0.0;
  double argmin_sigma = 0.0;
  double argmin_aspect = 1.0;
  std::vector<ScalingGridCheck> grid_checks;  // isotropic profile, coarse then fine
};

std::vector<double> default_sigmas();

/// Scans prolate Gaussian profiles of the given aspect ratios over sigma and
/// compares the analytic terms with grid evaluations of the isotropic profile
/// on two grids.
ScalingTrialReport scaling_trial(double lambda, const std::vector<double>& sigmas, const XcFunctional& xc,
                                 const std::vector<double>& aspects = {1.0, 2.0, 4.0, 8.0, 16.0},
                                 const std::vector<int>& check_grids = {32, 48});

/// Aufbau structure of a converged state: occupied levels at or below
/// eps_F + deg_tol, empty ones at or above eps_F - deg_tol, fractional
/// occupations only within deg_tol of eps_F. Returns the worst violation.
double check_aufbau(const std::vector<double>& eigenvalues, const std::vector<double>& occupations, double fermi,
                    double deg_tol);

/// 0 <= n <= 1, |sum n - lambda| <= 1e-10 and orthonormality within 1e-8 at
/// every recorded iterate of every start; returns the number of violating iterates.
int coleman_violations(const ScfState& s, double lambda);

struct DerivativeCheck {
  double analytic = 0.0;
  double finite_difference = 0.0;
  double step = 0.0;
  std::uint64_t seed = 0;

  double error() const noexcept;
};

/// d/dt E_xc(R + t dR) at t = 0 against integral tr[V_xc dR].
DerivativeCheck check_xc_derivative(const SpinDensityField& r, const SpinDensityField& dr, const XcFunctional& f,
                                    double step = 1e-4);

/// Central difference of the total energy along a random Hermitian direction
/// (occupied-virtual rotation plus occupation changes of the occupied
/// orbitals) against Tr(H dgamma).
DerivativeCheck check_energy_derivative(const ScfState& state, const ScfSetup& setup, std::uint64_t seed,
                                        double step = 1e-3);

struct DecayFit {
  std::vector<double> radii;
  std::vector<double> log_density;
  double slope = 0.0;
  double intercept = 0.0;
  double correlation = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
};

/// Fits log of the shell-averaged density against the distance from the
/// nuclear centre. Shells have width h; the window starts 2 bohr from every
/// nucleus and ends at 80% of the half box. Throws ConfigError with a
/// diagnostic when fewer than four usable shells remain.
DecayFit fit_decay(const RealField& rho, const std::vector<Nucleus>& nuclei);

struct SweepPoint {
  double lambda = 0.0;
  double energy = 0.0;
  bool converged = false;
  int iterations = 0;
  std::string start;
  double energy_inf = 0.0;
  bool converged_inf = false;
  int iterations_inf = 0;
  int coleman_violations = 0;  // over every iterate of both solves
  int iterates_checked = 0;
  std::string error;
};

struct SweepReport {
  std::vector<double> lambdas;  // requested values
  std::vector<SweepPoint> points;  // requested values plus their halves, ascending
  double tol_bind = 1e-4;
  std::vector<CheckResult> checks;
  std::string grid;
  std::string mode;
};

/// Solves the problem and its counterpart at infinity for every requested
/// lambda and for lambda/2, then evaluates sign, binding, monotonicity and
/// subadditivity at mu = lambda/2 as soft checks on converged points only.
SweepReport sweep_lambda(const ScfProblem& base, const std::vector<double>& lambdas, double tol_bind = 1e-4);

const SweepPoint* find_point(const SweepReport& report, double lambda);

}  // namespace lsda
