#include "lsda/spin_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lsda/error.hpp"
#include "lsda/kernels.hpp"

namespace lsda {

double OccupiedSet::trace() const noexcept {
  double t = 0.0;
  for (double n : occupations) t += n;
  return t;
}

ColemanDiagnostics coleman_diagnostics(const OccupiedSet& s) {
  ColemanDiagnostics d;
  if (s.occupations.empty()) return d;
  d.min_occupation = *std::min_element(s.occupations.begin(), s.occupations.end());
  d.max_occupation = *std::max_element(s.occupations.begin(), s.occupations.end());
  d.trace = s.trace();
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = a; b < s.size(); ++b) {
      const cplx ip = inner(s.orbitals[a], s.orbitals[b]);
      const double err = std::abs(ip - (a == b ? 1.0 : 0.0));
      d.max_orthonormality_error = std::max(d.max_orthonormality_error, err);
    }
  return d;
}

void require_admissible(const OccupiedSet& s, double orth_tol) {
  if (s.orbitals.size() != s.occupations.size())
    throw ContractViolation("occupied set: orbital and occupation counts differ");
  for (double n : s.occupations)
    if (!(n >= 0.0 && n <= 1.0)) throw ContractViolation("occupied set: occupation outside [0, 1]");
  const auto d = coleman_diagnostics(s);
  if (d.max_orthonormality_error > orth_tol)
    throw ContractViolation("occupied set: orbitals not orthonormal (error " +
                            std::to_string(d.max_orthonormality_error) + ")");
}

void orthonormalize(std::vector<SpinorField>& orbitals) {
  for (std::size_t a = 0; a < orbitals.size(); ++a) {
    SpinorField& phi = orbitals[a];
    // two passes keep the projection error at rounding level
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t b = 0; b < a; ++b) {
        const cplx c = inner(orbitals[b], phi);
        const auto& q = orbitals[b].data;
        for (std::size_t p = 0; p < phi.data.size(); ++p) phi.data[p] -= c * q[p];
      }
    const double nrm = norm(phi);
    if (!(nrm > 1e-12)) throw NumericError("orthonormalize: linearly dependent orbitals");
    for (cplx& v : phi.data) v /= nrm;
  }
}

RealField SpinDensityField::trace() const {
  RealField rho(grid);
  for (std::size_t p = 0; p < rho.size(); ++p) rho[p] = uu[p] + dd[p];
  return rho;
}

SpinDensityField density_from_orbitals(const OccupiedSet& s) {
  if (s.orbitals.empty()) throw ContractViolation("density_from_orbitals: empty occupied set");
  if (s.orbitals.size() != s.occupations.size())
    throw ContractViolation("density_from_orbitals: orbital and occupation counts differ");
  const Grid& g = s.orbitals.front().grid;
  SpinDensityField r(g);
  kernels::DensityView view{r.uu.span(), r.dd.span(), r.ud_re.span(), r.ud_im.span()};
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double n = s.occupations[k];
    if (!(n >= 0.0 && n <= 1.0))
      throw ContractViolation("density_from_orbitals: occupation outside [0, 1]");
    require_same_grid(g, s.orbitals[k].grid, "density_from_orbitals");
    if (n == 0.0) continue;
    kernels::accumulate_density(s.orbitals[k].up(), s.orbitals[k].down(), n, view);
  }
  return r;
}

EigenvaluesPM eigenvalues_pm(const SpinDensityField& r) {
  EigenvaluesPM out{RealField(r.grid), RealField(r.grid)};
  for (std::size_t p = 0; p < r.uu.size(); ++p) {
    const double uu = r.uu[p], dd = r.dd[p];
    const double rho = uu + dd;
    const double diff = uu - dd;
    const double s = std::sqrt(diff * diff + 4.0 * (r.ud_re[p] * r.ud_re[p] + r.ud_im[p] * r.ud_im[p]));
    if (!std::isfinite(s) || !std::isfinite(rho)) throw NumericError("eigenvalues_pm: non-finite density");
    out.plus[p] = 0.5 * (rho + s);
    out.minus[p] = 0.5 * (rho - s);
  }
  return out;
}

VectorField magnetization(const SpinDensityField& r) {
  VectorField m(r.grid);
  for (std::size_t p = 0; p < r.uu.size(); ++p) {
    m.x[p] = 2.0 * r.ud_re[p];
    m.y[p] = -2.0 * r.ud_im[p];
    m.z[p] = r.uu[p] - r.dd[p];
  }
  return m;
}

SpinorField flip(const SpinorField& phi) {
  SpinorField out(phi.grid);
  auto up = phi.up();
  auto down = phi.down();
  auto oup = out.up();
  auto odown = out.down();
  for (std::size_t p = 0; p < phi.nodes(); ++p) {
    oup[p] = std::conj(down[p]);
    odown[p] = -std::conj(up[p]);
  }
  return out;
}

OccupiedSet flip(const OccupiedSet& s) {
  OccupiedSet out;
  out.occupations = s.occupations;
  out.orbitals.reserve(s.size());
  for (const auto& phi : s.orbitals) out.orbitals.push_back(flip(phi));
  return out;
}

int ExternalFields::total_charge() const noexcept {
  int z = 0;
  for (const auto& nuc : nuclei) z += nuc.charge;
  return z;
}

VectorField sample_magnetic_field(const MagneticFieldSpec& spec, const Grid& g) {
  VectorField b(g);
  using Kind = MagneticFieldSpec::Kind;
  if (spec.kind == Kind::none) return b;
  if (spec.kind == Kind::file) {
    std::ifstream in(spec.path);
    if (!in) throw ConfigError("magnetic field file not readable: " + spec.path);
    std::string line;
    std::size_t p = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream row(line);
      double bx, by, bz;
      if (!(row >> bx >> by >> bz)) throw ConfigError("magnetic field file: malformed row " + std::to_string(p + 1));
      if (p >= g.size()) throw ConfigError("magnetic field file: more rows than grid nodes");
      b.x[p] = bx;
      b.y[p] = by;
      b.z[p] = bz;
      ++p;
    }
    if (p != g.size()) throw ConfigError("magnetic field file: expected " + std::to_string(g.size()) + " rows");
    return b;
  }
  const double len = std::sqrt(spec.axis[0] * spec.axis[0] + spec.axis[1] * spec.axis[1] + spec.axis[2] * spec.axis[2]);
  if (!(len > 0.0)) throw ConfigError("magnetic field axis must be non-zero");
  const Vec3 dir{spec.axis[0] / len, spec.axis[1] / len, spec.axis[2] / len};
  for (std::size_t p = 0; p < g.size(); ++p) {
    double a = spec.amplitude;
    if (spec.kind == Kind::gaussian) {
      const Vec3 r = g.position(p);
      double d2 = 0.0;
      for (int c = 0; c < 3; ++c) d2 += (r[c] - spec.center[c]) * (r[c] - spec.center[c]);
      a *= std::exp(-0.5 * d2 / (spec.width * spec.width));
    }
    b.x[p] = a * dir[0];
    b.y[p] = a * dir[1];
    b.z[p] = a * dir[2];
  }
  return b;
}

UField assemble_U(const VectorField& b, const RealField& v, double mu) {
  require_same_grid(b.x.grid, v.grid, "assemble_U");
  UField u(v.grid);
  u.mu = mu;
  for (std::size_t p = 0; p < v.size(); ++p) {
    u.uu[p] = v[p] - mu * b.z[p];
    u.dd[p] = v[p] + mu * b.z[p];
    u.ud_re[p] = -mu * b.x[p];
    u.ud_im[p] = mu * b.y[p];
  }
  return u;
}

UField assemble_U(const ExternalFields& ext, const RealField& v, const Grid& g) {
  require_same_grid(g, v.grid, "assemble_U");
  return assemble_U(sample_magnetic_field(ext.field, g), v, ext.mu);
}

ExternalEnergy external_energy(const UField& u, const SpinDensityField& r) {
  require_same_grid(u.grid, r.grid, "external_energy");
  const std::size_t nodes = r.grid.size();
  std::vector<double> trace_ur(nodes), vrho(nodes), bm(nodes);
  for (std::size_t p = 0; p < nodes; ++p) {
    const cplx u_ud(u.ud_re[p], u.ud_im[p]);
    const cplx r_ud(r.ud_re[p], r.ud_im[p]);
    // tr[U R] = U_uu R_uu + U_ud R_du + U_du R_ud + U_dd R_dd
    trace_ur[p] = u.uu[p] * r.uu[p] + u.dd[p] * r.dd[p] + (u_ud * std::conj(r_ud) + std::conj(u_ud) * r_ud).real();
    const double v = 0.5 * (u.uu[p] + u.dd[p]);
    const double mbx = -u.ud_re[p], mby = u.ud_im[p], mbz = 0.5 * (u.dd[p] - u.uu[p]);
    const double mx = 2.0 * r.ud_re[p], my = -2.0 * r.ud_im[p], mz = r.uu[p] - r.dd[p];
    vrho[p] = v * (r.uu[p] + r.dd[p]);
    bm[p] = -(mbx * mx + mby * my + mbz * mz);
  }
  const double dv = r.grid.cell_volume();
  return {dv * kernels::sum(trace_ur), dv * kernels::sum(vrho), dv * kernels::sum(bm)};
}

}  // namespace lsda
