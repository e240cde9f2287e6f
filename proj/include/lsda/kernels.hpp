#pragma once

// Node-loop kernels shared by every module. The lsda::kernels functions are
// OpenMP-parallel; lsda::kernels::reference holds straightforward serial
// versions that the tests and the benchmark compare against.
//
// Reductions are computed over fixed-size blocks whose partial sums are added
// in block order, so results do not depend on the thread count.

#include <complex>
#include <cstddef>
#include <span>

namespace lsda::kernels {

using cplx = std::complex<double>;

inline constexpr std::size_t kReductionBlock = 2048;

/// Local 2x2 Hermitian matrix field [[uu, ud],[conj(ud), dd]] with ud = ud_re + i ud_im.
struct LocalMatrixView {
  std::span<const double> uu;
  std::span<const double> dd;
  std::span<const double> ud_re;
  std::span<const double> ud_im;
};

/// Spin density accumulators, one entry per node.
struct DensityView {
  std::span<double> uu;
  std::span<double> dd;
  std::span<double> ud_re;
  std::span<double> ud_im;
};

// out = Delta_h in on an n^3 Dirichlet grid with spacing h.
void laplacian(std::span<const double> in, std::span<double> out, int n, double h);
void laplacian(std::span<const cplx> in, std::span<cplx> out, int n, double h);

double sum(std::span<const double> a);
double dot(std::span<const double> a, std::span<const double> b);
cplx dot(std::span<const cplx> a, std::span<const cplx> b);  // sum conj(a) b

// out = -1/2 Delta_h in + M in for spinors stored [up | down], where M is the
// local 2x2 matrix. A scalar problem (one channel) passes a view whose spans
// are empty except uu.
void apply_hamiltonian(std::span<const double> in, std::span<double> out, int n, double h,
                       const LocalMatrixView& m);
void apply_hamiltonian(std::span<const cplx> in, std::span<cplx> out, int n, double h,
                       const LocalMatrixView& m);

// rho^{ab} += occ * phi^a conj(phi^b).
void accumulate_density(std::span<const cplx> up, std::span<const cplx> down, double occ,
                        const DensityView& r);

namespace reference {

void laplacian(std::span<const double> in, std::span<double> out, int n, double h);
void laplacian(std::span<const cplx> in, std::span<cplx> out, int n, double h);
double sum(std::span<const double> a);
cplx dot(std::span<const cplx> a, std::span<const cplx> b);
void apply_hamiltonian(std::span<const cplx> in, std::span<cplx> out, int n, double h,
                       const LocalMatrixView& m);
void accumulate_density(std::span<const cplx> up, std::span<const cplx> down, double occ,
                        const DensityView& r);

}  // namespace reference

}  // namespace lsda::kernels
