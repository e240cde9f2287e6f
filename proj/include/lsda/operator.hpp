#pragma once

#include <span>
#include <string>

#include "lsda/grid.hpp"
#include "lsda/spin_model.hpp"
#include "lsda/xc.hpp"

namespace lsda {

/// Model tier. infinity drops U entirely; noninteracting drops Hartree and xc;
/// collinear keeps R diagonal and couples only B_z; unpolarized solves one
/// spatial problem with equal spin channels and no Zeeman term.
enum class Mode { full, collinear, unpolarized, infinity, noninteracting };

Mode parse_mode(const std::string& s);
std::string to_string(Mode m);

struct BlockFlags {
  bool external = true;
  bool hartree = true;
  bool xc = true;
};

BlockFlags blocks_for(Mode m);

/// -sum_k z_k / sqrt(|r - R_k|^2 + a^2). Throws ConfigError when a = 0 and a
/// nucleus sits on a node.
RealField nuclear_potential(const ExternalFields& ext, const Grid& g);

struct PoissonOptions {
  double tol = 1e-10;
  int max_iter = 10000;

  friend bool operator==(const PoissonOptions&, const PoissonOptions&) = default;
};

struct HartreeSolution {
  RealField phi;
  RealField potential;  // gradient of 1/2 <rho, phi> with respect to rho
  double residual_norm = 0.0;  // relative to the right-hand side
  int iterations = 0;
};

/// Solves -Delta_h phi = 4 pi rho by conjugate gradients with Dirichlet data
/// q/|r - c| on the ghost layer (q total charge, c box centre). Because the
/// ghost data depend on rho through q, the potential entering H is the exact
/// gradient of the discrete energy, which differs from phi by a smooth
/// correction. Throws SolverError when the iteration cap is hit.
HartreeSolution hartree_potential(const RealField& rho, const PoissonOptions& opt = {},
                                  const RealField* initial_guess = nullptr);

/// 1/2 integral rho phi.
double hartree_energy(const RealField& rho, const HartreeSolution& sol);

/// The mean-field Hamiltonian -1/2 Delta_h + local 2x2 potential, applied
/// matrix-free. The individual blocks are kept for reporting.
struct MeanFieldOperator {
  Grid grid;
  Mode mode = Mode::full;
  BlockFlags blocks;
  UField u;                // zero when blocks.external is false
  HartreeSolution hartree; // phi zero when blocks.hartree is false
  MatrixField vxc;         // zero when blocks.xc is false
  MatrixField local;       // sum of the active local blocks

  std::size_t nodes() const noexcept { return grid.size(); }
  /// True when the local off-diagonal is real, so real vectors stay real.
  bool is_real() const noexcept;

  /// Full spinor action; in and out hold 2*nodes() entries [up | down].
  void apply(std::span<const double> in, std::span<double> out) const;
  void apply(std::span<const cplx> in, std::span<cplx> out) const;
  /// Action on a single spin channel (0 up, 1 down) without spin coupling;
  /// used by the collinear and unpolarized tiers.
  void apply_channel(int channel, std::span<const double> in, std::span<double> out) const;
  void apply_channel(int channel, std::span<const cplx> in, std::span<cplx> out) const;
};

/// U as seen by a model tier: unpolarized keeps only V, collinear drops the
/// transverse field components.
UField restrict_u(Mode mode, const UField& u);

/// R as seen by a model tier: collinear drops rho^{ud}, unpolarized also
/// replaces the diagonal by rho/2.
SpinDensityField restrict_density(Mode mode, const SpinDensityField& r);

/// Assembles H for the given R (which may be null when neither Hartree nor xc
/// is active). `u` carries V and B.
MeanFieldOperator assemble_operator(Mode mode, const UField& u, const SpinDensityField* r,
                                    const XcFunctional& xc, const PoissonOptions& poisson = {},
                                    const RealField* hartree_guess = nullptr);

SpinorField apply_H(const MeanFieldOperator& op, const SpinorField& psi);

}  // namespace lsda
