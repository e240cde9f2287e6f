#pragma once

#include <string>
#include <vector>

#include "lsda/grid.hpp"

namespace lsda {

/// Bohr magneton in atomic units.
inline constexpr double kBohrMagneton = 0.5;

/// Mixed one-body state in orbital form: gamma = sum_k n_k |Phi_k><Phi_k|.
struct OccupiedSet {
  std::vector<SpinorField> orbitals;
  std::vector<double> occupations;

  std::size_t size() const noexcept { return orbitals.size(); }
  double trace() const noexcept;
};

struct ColemanDiagnostics {
  double min_occupation = 0.0;
  double max_occupation = 0.0;
  double trace = 0.0;
  double max_orthonormality_error = 0.0;
};

ColemanDiagnostics coleman_diagnostics(const OccupiedSet& s);

/// Throws ContractViolation unless 0 <= n_k <= 1 and <Phi_k, Phi_l> = delta_kl within orth_tol.
void require_admissible(const OccupiedSet& s, double orth_tol = 1e-8);

/// Modified Gram-Schmidt in the discrete inner product. Throws NumericError on
/// a (numerically) dependent set.
void orthonormalize(std::vector<SpinorField>& orbitals);

/// The 2x2 Hermitian spin density matrix field stored as four real channels;
/// rho^{du} = conj(rho^{ud}) is implicit.
struct SpinDensityField {
  Grid grid;
  RealField uu;
  RealField dd;
  RealField ud_re;
  RealField ud_im;

  SpinDensityField() = default;
  explicit SpinDensityField(const Grid& g) : grid(g), uu(g), dd(g), ud_re(g), ud_im(g) {}

  RealField trace() const;
};

SpinDensityField density_from_orbitals(const OccupiedSet& s);

struct EigenvaluesPM {
  RealField plus;
  RealField minus;
};

/// rho^{+/-} = (rho +/- sqrt((uu - dd)^2 + 4|ud|^2)) / 2 at every node.
EigenvaluesPM eigenvalues_pm(const SpinDensityField& r);

struct VectorField {
  RealField x;
  RealField y;
  RealField z;

  VectorField() = default;
  explicit VectorField(const Grid& g) : x(g), y(g), z(g) {}
};

/// m = tr[sigma R]: (2 Re rho^{ud}, -2 Im rho^{ud}, rho^{uu} - rho^{dd}).
VectorField magnetization(const SpinDensityField& r);

/// (phi_u, phi_d) -> (conj(phi_d), -conj(phi_u)).
SpinorField flip(const SpinorField& phi);
OccupiedSet flip(const OccupiedSet& s);

struct Nucleus {
  int charge = 1;
  Vec3 position{0.0, 0.0, 0.0};

  friend bool operator==(const Nucleus&, const Nucleus&) = default;
};

/// Analytic or tabulated magnetic field.
struct MagneticFieldSpec {
  enum class Kind { none, uniform, gaussian, file };
  Kind kind = Kind::none;
  double amplitude = 0.0;
  Vec3 axis{0.0, 0.0, 1.0};
  Vec3 center{0.0, 0.0, 0.0};
  double width = 1.0;
  std::string path;

  friend bool operator==(const MagneticFieldSpec&, const MagneticFieldSpec&) = default;
};

struct ExternalFields {
  std::vector<Nucleus> nuclei;
  MagneticFieldSpec field;
  /// Soft-Coulomb length; negative means "use h/2".
  double softening = -1.0;
  double mu = kBohrMagneton;

  int total_charge() const noexcept;
  double softening_for(const Grid& g) const noexcept { return softening < 0.0 ? 0.5 * g.spacing() : softening; }
};

/// Samples B on the grid. File fields are read as node-ordered rows "bx by bz".
VectorField sample_magnetic_field(const MagneticFieldSpec& spec, const Grid& g);

/// U = [[V - mu Bz, -mu Bx + i mu By], [-mu Bx - i mu By, V + mu Bz]].
struct UField {
  Grid grid;
  RealField uu;
  RealField dd;
  RealField ud_re;
  RealField ud_im;
  double mu = kBohrMagneton;

  UField() = default;
  explicit UField(const Grid& g) : grid(g), uu(g), dd(g), ud_re(g), ud_im(g) {}
};

UField assemble_U(const VectorField& b, const RealField& v, double mu);
UField assemble_U(const ExternalFields& ext, const RealField& v, const Grid& g);

struct ExternalEnergy {
  double total = 0.0;      // integral of tr[U R]
  double potential = 0.0;  // integral of V rho
  double zeeman = 0.0;     // -mu integral of B.m
};

/// total is integrated from the matrix product; potential and zeeman from the
/// Pauli decomposition of U and R.
ExternalEnergy external_energy(const UField& u, const SpinDensityField& r);

}  // namespace lsda
