#include "lsda/scf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "lsda/error.hpp"
#include "lsda/kernels.hpp"

namespace lsda {

Starts parse_starts(const std::string& s) {
  if (s == "default") return Starts::standard;
  if (s == "aligned") return Starts::aligned;
  if (s == "both") return Starts::both;
  throw ConfigError("unknown starts '" + s + "'");
}

std::string to_string(Starts s) {
  switch (s) {
    case Starts::standard: return "default";
    case Starts::aligned: return "aligned";
    case Starts::both: return "both";
  }
  return "default";
}

ScfSetup prepare(const ScfProblem& problem) {
  ScfSetup s;
  s.grid = problem.grid;
  s.mode = problem.mode;
  s.v = nuclear_potential(problem.ext, problem.grid);
  s.b = sample_magnetic_field(problem.ext.field, problem.grid);
  if (blocks_for(problem.mode).external) {
    s.u = restrict_u(problem.mode, assemble_U(s.b, s.v, problem.ext.mu));
  } else {
    s.u = UField(problem.grid);
    s.u.mu = problem.ext.mu;
  }
  s.xc = blocks_for(problem.mode).xc ? problem.xc : XcFunctional::none();
  s.poisson = problem.opt.poisson;
  return s;
}

Occupation occupy(const std::vector<double>& eigenvalues, double lambda, double deg_tol) {
  if (!(lambda > 0.0)) throw ConfigError("occupy: lambda must be positive");
  const std::size_t count = eigenvalues.size();
  if (lambda > static_cast<double>(count) + 1e-12)
    throw ConfigError("occupy: lambda exceeds the number of computed levels; increase eig.k_extra");
  Occupation out;
  out.occupations.assign(count, 0.0);
  double remaining = lambda;
  std::size_t i = 0;
  while (i < count) {
    std::size_t j = i + 1;
    while (j < count && std::abs(eigenvalues[j] - eigenvalues[i]) <= deg_tol) ++j;
    const double group = static_cast<double>(j - i);
    out.fermi = eigenvalues[i];
    if (remaining <= group + 1e-12) {
      const double share = std::min(1.0, remaining / group);
      for (std::size_t q = i; q < j; ++q) out.occupations[q] = share;
      break;
    }
    for (std::size_t q = i; q < j; ++q) out.occupations[q] = 1.0;
    remaining -= group;
    i = j;
  }
  return out;
}

EnergyBreakdown total_energy(const OccupiedSet& s, const ScfSetup& setup) {
  bool any = false;
  for (double n : s.occupations) any = any || n > 0.0;
  if (!any) return {};
  return total_energy(s, density_from_orbitals(s), setup);
}

EnergyBreakdown total_energy(const OccupiedSet& s, const SpinDensityField& r, const ScfSetup& setup) {
  EnergyBreakdown e;
  const BlockFlags blocks = blocks_for(setup.mode);
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s.occupations[k] == 0.0) continue;
    const SpinorField lap = laplacian_apply(s.orbitals[k]);
    e.kinetic += s.occupations[k] * -0.5 * inner(s.orbitals[k], lap).real();
  }
  if (blocks.hartree) {
    const RealField rho = r.trace();
    e.hartree = hartree_energy(rho, hartree_potential(rho, setup.poisson));
  }
  if (blocks.external) {
    const ExternalEnergy ext = external_energy(setup.u, r);
    e.v_ext = ext.potential;
    e.zeeman = ext.zeeman;
  }
  if (blocks.xc) e.xc = exc_lsda(restrict_density(setup.mode, r), setup.xc);
  e.total = e.sum_of_parts();
  return e;
}

SpinDensityField initial_density(const ScfProblem& problem, const ScfSetup& setup, bool aligned) {
  const Grid& g = problem.grid;
  RealField rho(g);
  std::vector<std::pair<double, Vec3>> centres;
  const int z = problem.ext.total_charge();
  for (const auto& nuc : problem.ext.nuclei) centres.emplace_back(double(nuc.charge) / z, nuc.position);
  if (centres.empty()) centres.emplace_back(1.0, g.center());
  for (std::size_t p = 0; p < g.size(); ++p) {
    const Vec3 r = g.position(p);
    for (const auto& [w, c] : centres) {
      const double d2 = (r[0] - c[0]) * (r[0] - c[0]) + (r[1] - c[1]) * (r[1] - c[1]) + (r[2] - c[2]) * (r[2] - c[2]);
      rho[p] += w * std::exp(-d2);
    }
  }
  const double q = integrate(rho);
  for (double& v : rho.values) v *= problem.lambda / q;

  SpinDensityField r(g);
  const bool polarize = aligned && problem.mode != Mode::unpolarized;
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (!polarize) {
      r.uu[p] = r.dd[p] = 0.5 * rho[p];
      continue;
    }
    Vec3 dir{setup.b.x[p], setup.b.y[p], setup.b.z[p]};
    if (problem.mode == Mode::collinear) dir[0] = dir[1] = 0.0;
    const double len = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
    if (len > 0.0)
      for (double& c : dir) c /= len;
    else
      dir = {0.0, 0.0, 1.0};
    // R = rho/2 (I + dir.sigma)
    r.uu[p] = 0.5 * rho[p] * (1.0 + dir[2]);
    r.dd[p] = 0.5 * rho[p] * (1.0 - dir[2]);
    r.ud_re[p] = 0.5 * rho[p] * dir[0];
    r.ud_im[p] = -0.5 * rho[p] * dir[1];
  }
  return r;
}

namespace {

double density_change(const SpinDensityField& a, const SpinDensityField& b) {
  std::vector<double> d(a.grid.size());
  for (std::size_t p = 0; p < d.size(); ++p)
    d[p] = std::abs(a.uu[p] - b.uu[p]) + std::abs(a.dd[p] - b.dd[p]) + std::abs(a.ud_re[p] - b.ud_re[p]) +
           std::abs(a.ud_im[p] - b.ud_im[p]);
  return a.grid.cell_volume() * kernels::sum(d);
}

bool field_is_zero(const VectorField& b) {
  auto zero = [](const RealField& f) {
    return std::all_of(f.values.begin(), f.values.end(), [](double v) { return v == 0.0; });
  };
  return zero(b.x) && zero(b.y) && zero(b.z);
}

std::string oscillation_hint(const std::vector<IterationRecord>& h) {
  if (h.size() < 12) return "";
  int flips = 0;
  for (std::size_t i = h.size() - 10; i < h.size(); ++i) {
    const double d1 = h[i].total - h[i - 1].total;
    const double d0 = h[i - 1].total - h[i - 2].total;
    if (d1 * d0 < 0.0) ++flips;
  }
  return flips >= 7 ? "; energy oscillates, try a smaller mix.beta" : "";
}

}  // namespace

ScfState scf_run(const ScfProblem& problem, const ScfSetup& setup, const SpinDensityField& initial,
                 const std::string& label) {
  const ScfOptions& opt = problem.opt;
  const int k = static_cast<int>(std::ceil(problem.lambda - 1e-12)) + opt.k_extra;
  const BlockFlags blocks = blocks_for(problem.mode);
  const bool fixed_operator = !blocks.hartree && !(blocks.xc && setup.xc.active());

  ScfState state;
  state.start = label;
  SpinDensityField r_in = initial;
  std::vector<SpinorField> previous;
  RealField phi_guess;
  double e_prev = std::numeric_limits<double>::quiet_NaN();
  int streak = 0;

  for (int it = 1; it <= opt.max_iter; ++it) {
    const MeanFieldOperator op = assemble_operator(problem.mode, setup.u, &r_in, setup.xc, setup.poisson,
                                                   phi_guess.size() ? &phi_guess : nullptr);
    if (blocks.hartree) phi_guess = op.hartree.phi;
    EigenSolution eig = lowest_eigenpairs(op, k, opt.eig, previous.empty() ? nullptr : &previous);
    const Occupation occ = occupy(eig.eigenvalues, problem.lambda, opt.deg_tol);

    OccupiedSet set{eig.eigenvectors, occ.occupations};
    SpinDensityField r_out = density_from_orbitals(set);
    const EnergyBreakdown energy = total_energy(set, r_out, setup);

    IterationRecord rec;
    rec.iteration = it;
    rec.total = energy.total;
    rec.delta_rho = density_change(r_out, r_in);
    rec.delta_e = std::isnan(e_prev) ? std::numeric_limits<double>::infinity() : std::abs(energy.total - e_prev);
    rec.fermi = occ.fermi;
    rec.coleman = coleman_diagnostics(set);
    rec.eig_iterations = eig.iterations;
    state.history.push_back(rec);
    e_prev = energy.total;

    state.occupied = std::move(set);
    state.density = r_out;
    state.orbital_energies = eig.eigenvalues;
    state.fermi = occ.fermi;
    state.energy = energy;
    state.iterations = it;
    previous = eig.eigenvectors;

    if (fixed_operator) {
      state.converged = true;
      break;
    }
    streak = (rec.delta_rho < opt.tol_rho && rec.delta_e < opt.tol_e) ? streak + 1 : 0;
    if (streak >= 3) {
      state.converged = true;
      break;
    }
    const double beta = opt.mix_beta;
    for (std::size_t p = 0; p < r_in.grid.size(); ++p) {
      r_in.uu[p] = (1.0 - beta) * r_in.uu[p] + beta * r_out.uu[p];
      r_in.dd[p] = (1.0 - beta) * r_in.dd[p] + beta * r_out.dd[p];
      r_in.ud_re[p] = (1.0 - beta) * r_in.ud_re[p] + beta * r_out.ud_re[p];
      r_in.ud_im[p] = (1.0 - beta) * r_in.ud_im[p] + beta * r_out.ud_im[p];
    }
  }
  if (!state.converged) return state;

  const OccupiedSet flipped = flip(state.occupied);
  const EnergyBreakdown e_flip = total_energy(flipped, setup);
  if (e_flip.total < state.energy.total - 1e-12 * (1.0 + std::abs(state.energy.total))) {
    state.occupied = flipped;
    state.density = density_from_orbitals(flipped);
    state.energy = e_flip;
    state.flipped = true;
  }
  return state;
}

ScfState scf_solve(const ScfProblem& problem) {
  if (!(problem.lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (problem.opt.mix_beta <= 0.0 || problem.opt.mix_beta > 1.0) throw ConfigError("mix.beta must lie in (0, 1]");
  if (blocks_for(problem.mode).xc && problem.xc.active()) {
    const CondGReport rep = validate_cond_g(problem.xc);
    if (!rep.ok) throw ConfigError("xc functional fails the admissibility check: " + rep.failures.front());
  }
  const ScfSetup setup = prepare(problem);
  const bool field_on = blocks_for(problem.mode).external && !field_is_zero(setup.b);

  std::vector<bool> starts;
  switch (problem.opt.starts) {
    case Starts::standard:
      starts.push_back(false);
      if (field_on) starts.push_back(true);
      break;
    case Starts::aligned: starts.push_back(true); break;
    case Starts::both:
      starts.push_back(false);
      starts.push_back(true);
      break;
  }

  std::optional<ScfState> best;
  std::vector<ScfState> failed;
  std::vector<IterationRecord> discarded;
  auto discard = [&](const ScfState& s) { discarded.insert(discarded.end(), s.history.begin(), s.history.end()); };
  for (bool aligned : starts) {
    ScfState s = scf_run(problem, setup, initial_density(problem, setup, aligned), aligned ? "aligned" : "default");
    if (!s.converged) {
      discard(s);
      failed.push_back(std::move(s));
      continue;
    }
    if (!best || s.energy.total < best->energy.total) {
      if (best) discard(*best);
      best = std::move(s);
    } else {
      discard(s);
    }
  }
  if (!best) {
    const auto& h = failed.back().history;
    throw SolverError("scf: no convergence within " + std::to_string(problem.opt.max_iter) +
                          " iterations (last delta_rho " + std::to_string(h.back().delta_rho) + ", delta_e " +
                          std::to_string(h.back().delta_e) + ")" + oscillation_hint(h),
                      {h.back().delta_rho, h.back().delta_e});
  }
  best->other_history = std::move(discarded);
  return std::move(*best);
}

}  // namespace lsda
