#include "lsda/operator.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "lsda/error.hpp"
#include "lsda/kernels.hpp"

namespace lsda {

Mode parse_mode(const std::string& s) {
  if (s == "full") return Mode::full;
  if (s == "collinear") return Mode::collinear;
  if (s == "unpolarized") return Mode::unpolarized;
  if (s == "infinity") return Mode::infinity;
  if (s == "noninteracting") return Mode::noninteracting;
  throw ConfigError("unknown mode '" + s + "'");
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::full: return "full";
    case Mode::collinear: return "collinear";
    case Mode::unpolarized: return "unpolarized";
    case Mode::infinity: return "infinity";
    case Mode::noninteracting: return "noninteracting";
  }
  return "full";
}

BlockFlags blocks_for(Mode m) {
  switch (m) {
    case Mode::infinity: return {false, true, true};
    case Mode::noninteracting: return {true, false, false};
    default: return {true, true, true};
  }
}

RealField nuclear_potential(const ExternalFields& ext, const Grid& g) {
  const double a = ext.softening_for(g);
  if (a < 0.0) throw ConfigError("softening length must be >= 0");
  RealField v(g);
  for (const auto& nuc : ext.nuclei) {
    if (nuc.charge < 1) throw ConfigError("nuclear charge must be a positive integer");
    for (std::size_t p = 0; p < g.size(); ++p) {
      const Vec3 r = g.position(p);
      double d2 = 0.0;
      for (int c = 0; c < 3; ++c) d2 += (r[c] - nuc.position[c]) * (r[c] - nuc.position[c]);
      const double s2 = d2 + a * a;
      if (s2 <= 1e-24 * g.spacing() * g.spacing())
        throw ConfigError("nucleus on a grid node with zero softening: singular potential");
      v[p] -= nuc.charge / std::sqrt(s2);
    }
  }
  return v;
}

namespace {

// Ghost-layer values 1/|r - c| of a unit monopole at the box centre, folded
// into a right-hand side with the stencil weight 1/h^2.
std::vector<double> monopole_boundary(const Grid& g) {
  const int n = g.n();
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  const Vec3 c = g.center();
  auto ghost_value = [&](int i, int j, int k) {
    const Vec3 r = g.position(i, j, k);
    return 1.0 / std::hypot(r[0] - c[0], r[1] - c[1], r[2] - c[2]);
  };
  std::vector<double> w(g.size(), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double add = 0.0;
        if (i == 0) add += ghost_value(-1, j, k);
        if (i == n - 1) add += ghost_value(n, j, k);
        if (j == 0) add += ghost_value(i, -1, k);
        if (j == n - 1) add += ghost_value(i, n, k);
        if (k == 0) add += ghost_value(i, j, -1);
        if (k == n - 1) add += ghost_value(i, j, n);
        w[g.index(i, j, k)] = add * inv_h2;
      }
  return w;
}

struct CgResult {
  int iterations = 0;
  double residual = 0.0;
};

// Conjugate gradients for -Delta_h x = b, starting from the contents of x.
CgResult solve_dirichlet(const Grid& g, const std::vector<double>& b, std::vector<double>& x, double tol,
                         int max_iter) {
  const std::size_t nodes = g.size();
  const double bnorm = std::sqrt(kernels::dot(b, b));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return {};
  }
  std::vector<double> r(nodes), pdir(nodes), ap(nodes);
  const int n = g.n();
  const double h = g.spacing();
  auto apply_a = [&](const std::vector<double>& in, std::vector<double>& out) {
    kernels::laplacian(in, out, n, h);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(nodes); ++p) out[p] = -out[p];
  };
  apply_a(x, ap);
  for (std::size_t p = 0; p < nodes; ++p) r[p] = b[p] - ap[p];
  pdir = r;
  double rr = kernels::dot(r, r);
  int it = 0;
  while (std::sqrt(rr) > tol * bnorm) {
    if (it >= max_iter)
      throw SolverError("hartree_potential: CG did not converge, relative residual " +
                            std::to_string(std::sqrt(rr) / bnorm),
                        {std::sqrt(rr) / bnorm});
    apply_a(pdir, ap);
    const double alpha = rr / kernels::dot(pdir, ap);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(nodes); ++p) {
      x[p] += alpha * pdir[p];
      r[p] -= alpha * ap[p];
    }
    const double rr_new = kernels::dot(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(nodes); ++p) pdir[p] = r[p] + beta * pdir[p];
    ++it;
  }
  return {it, std::sqrt(rr) / bnorm};
}

// Discrete harmonic extension of the unit monopole ghost data; depends on the
// grid only, so it is computed once per grid.
const RealField& boundary_response(const Grid& g) {
  static std::mutex mutex;
  static std::vector<RealField> cache;
  std::lock_guard<std::mutex> lock(mutex);
  for (const auto& f : cache)
    if (f.grid == g) return f;
  RealField u(g);
  solve_dirichlet(g, monopole_boundary(g), u.values, 1e-13, 100000);
  if (cache.size() >= 8) cache.erase(cache.begin());
  cache.push_back(std::move(u));
  return cache.back();
}

}  // namespace

HartreeSolution hartree_potential(const RealField& rho, const PoissonOptions& opt, const RealField* initial_guess) {
  const Grid& g = rho.grid;
  const std::size_t nodes = g.size();
  HartreeSolution sol{RealField(g), RealField(g), 0.0, 0};

  const double q = integrate(rho);
  std::vector<double> b(nodes);
  for (std::size_t p = 0; p < nodes; ++p) b[p] = 4.0 * std::numbers::pi * rho[p];
  const bool charged = std::abs(q) > 1e-14;
  if (charged) {
    const std::vector<double> w = monopole_boundary(g);
    for (std::size_t p = 0; p < nodes; ++p) b[p] += q * w[p];
  }
  if (initial_guess) {
    require_same_grid(g, initial_guess->grid, "hartree_potential");
    sol.phi.values = initial_guess->values;
  }
  const CgResult cg = solve_dirichlet(g, b, sol.phi.values, opt.tol, opt.max_iter);
  sol.iterations = cg.iterations;
  sol.residual_norm = cg.residual;

  // phi = G rho + q u with G symmetric; the gradient of 1/2 <rho, phi> is
  // phi - q u / 2 + <rho, u> / 2.
  sol.potential = sol.phi;
  if (charged) {
    const RealField& u = boundary_response(g);
    const double ru = inner(rho, u);
    for (std::size_t p = 0; p < nodes; ++p) sol.potential[p] += 0.5 * (ru - q * u[p]);
  }
  return sol;
}

double hartree_energy(const RealField& rho, const HartreeSolution& sol) {
  return 0.5 * inner(rho, sol.phi);
}

bool MeanFieldOperator::is_real() const noexcept {
  return std::all_of(local.ud_im.values.begin(), local.ud_im.values.end(), [](double v) { return v == 0.0; });
}

namespace {

kernels::LocalMatrixView full_view(const MatrixField& m) {
  return {m.uu.span(), m.dd.span(), m.ud_re.span(), m.ud_im.span()};
}

kernels::LocalMatrixView channel_view(const MatrixField& m, int channel) {
  return {channel == 0 ? m.uu.span() : m.dd.span(), {}, {}, {}};
}

}  // namespace

void MeanFieldOperator::apply(std::span<const double> in, std::span<double> out) const {
  kernels::apply_hamiltonian(in, out, grid.n(), grid.spacing(), full_view(local));
}

void MeanFieldOperator::apply(std::span<const cplx> in, std::span<cplx> out) const {
  kernels::apply_hamiltonian(in, out, grid.n(), grid.spacing(), full_view(local));
}

void MeanFieldOperator::apply_channel(int channel, std::span<const double> in, std::span<double> out) const {
  kernels::apply_hamiltonian(in, out, grid.n(), grid.spacing(), channel_view(local, channel));
}

void MeanFieldOperator::apply_channel(int channel, std::span<const cplx> in, std::span<cplx> out) const {
  kernels::apply_hamiltonian(in, out, grid.n(), grid.spacing(), channel_view(local, channel));
}

UField restrict_u(Mode mode, const UField& u) {
  UField out = u;
  if (mode == Mode::unpolarized) {
    for (std::size_t p = 0; p < u.grid.size(); ++p) {
      const double v = 0.5 * (u.uu[p] + u.dd[p]);
      out.uu[p] = v;
      out.dd[p] = v;
      out.ud_re[p] = 0.0;
      out.ud_im[p] = 0.0;
    }
  } else if (mode == Mode::collinear) {
    std::fill(out.ud_re.values.begin(), out.ud_re.values.end(), 0.0);
    std::fill(out.ud_im.values.begin(), out.ud_im.values.end(), 0.0);
  }
  return out;
}

SpinDensityField restrict_density(Mode mode, const SpinDensityField& r) {
  SpinDensityField out = r;
  if (mode == Mode::unpolarized) {
    for (std::size_t p = 0; p < r.grid.size(); ++p) out.uu[p] = out.dd[p] = 0.5 * (r.uu[p] + r.dd[p]);
  }
  if (mode == Mode::collinear || mode == Mode::unpolarized) {
    std::fill(out.ud_re.values.begin(), out.ud_re.values.end(), 0.0);
    std::fill(out.ud_im.values.begin(), out.ud_im.values.end(), 0.0);
  }
  return out;
}

MeanFieldOperator assemble_operator(Mode mode, const UField& u, const SpinDensityField* r, const XcFunctional& xc,
                                    const PoissonOptions& poisson, const RealField* hartree_guess) {
  const Grid& g = u.grid;
  MeanFieldOperator op;
  op.grid = g;
  op.mode = mode;
  op.blocks = blocks_for(mode);
  op.u = UField(g);
  op.u.mu = u.mu;
  op.hartree.phi = RealField(g);
  op.hartree.potential = RealField(g);
  op.vxc = MatrixField(g);
  op.local = MatrixField(g);

  if (op.blocks.external) op.u = restrict_u(mode, u);
  if (op.blocks.hartree || (op.blocks.xc && xc.active())) {
    if (!r) throw ConfigError("assemble_operator: density required for Hartree/xc blocks");
    require_same_grid(g, r->grid, "assemble_operator");
  }
  if (op.blocks.hartree) op.hartree = hartree_potential(r->trace(), poisson, hartree_guess);
  if (op.blocks.xc && xc.active()) {
    op.vxc = vxc_matrix(restrict_density(mode, *r), xc);
  }
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double phi = op.hartree.potential[p];
    op.local.uu[p] = phi + op.u.uu[p] + op.vxc.uu[p];
    op.local.dd[p] = phi + op.u.dd[p] + op.vxc.dd[p];
    op.local.ud_re[p] = op.u.ud_re[p] + op.vxc.ud_re[p];
    op.local.ud_im[p] = op.u.ud_im[p] + op.vxc.ud_im[p];
  }
  return op;
}

SpinorField apply_H(const MeanFieldOperator& op, const SpinorField& psi) {
  require_same_grid(op.grid, psi.grid, "apply_H");
  SpinorField out(psi.grid);
  op.apply(std::span<const cplx>(psi.data), std::span<cplx>(out.data));
  return out;
}

}  // namespace lsda
