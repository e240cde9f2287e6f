#include "lsda/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <fmt/format.h>

#include "lsda/error.hpp"
#include "lsda/kernels.hpp"

namespace lsda {

std::string to_string(CheckClass c) { return c == CheckClass::exact ? "exact" : "soft"; }

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::soft_fail: return "soft-fail";
    case Verdict::not_evaluated: return "not-evaluated";
  }
  return "not-evaluated";
}

CheckResult make_check(std::string name, CheckClass kind, double value, double threshold, std::string detail) {
  CheckResult c{std::move(name), kind, value, threshold, Verdict::not_evaluated, std::move(detail)};
  if (std::isnan(value))
    c.verdict = Verdict::not_evaluated;
  else if (value <= threshold)
    c.verdict = Verdict::pass;
  else
    c.verdict = kind == CheckClass::exact ? Verdict::fail : Verdict::soft_fail;
  return c;
}

double check_flip_identity(const OccupiedSet& s, const UField& u) {
  const ExternalEnergy e = external_energy(u, density_from_orbitals(s));
  const ExternalEnergy ef = external_energy(u, density_from_orbitals(flip(s)));
  return std::abs(e.total + ef.total - 2.0 * e.potential) / (1.0 + std::abs(e.potential));
}

OccupiedSet random_occupied_set(const Grid& g, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  OccupiedSet s;
  for (int k = 0; k < count; ++k) {
    SpinorField phi(g);
    for (cplx& z : phi.data) z = cplx(normal(rng), normal(rng));
    s.orbitals.push_back(std::move(phi));
    s.occupations.push_back(unit(rng));
  }
  orthonormalize(s.orbitals);
  return s;
}

VectorField random_vector_field(const Grid& g, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  VectorField b(g);
  for (std::size_t p = 0; p < g.size(); ++p) {
    b.x[p] = dist(rng);
    b.y[p] = dist(rng);
    b.z[p] = dist(rng);
  }
  return b;
}

OccupiedSet gaussian_mixture_set(const Grid& g, int count, double width, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> shift(-0.1 * g.length(), 0.1 * g.length());
  std::normal_distribution<double> normal;
  const Vec3 c0 = g.center();
  OccupiedSet s;
  for (int k = 0; k < count; ++k) {
    const Vec3 c{c0[0] + shift(rng), c0[1] + shift(rng), c0[2] + shift(rng)};
    cplx a(normal(rng), normal(rng)), b(normal(rng), normal(rng));
    const double len = std::sqrt(std::norm(a) + std::norm(b));
    a /= len;
    b /= len;
    SpinorField phi(g);
    for (std::size_t p = 0; p < g.size(); ++p) {
      const Vec3 r = g.position(p);
      const double d2 = (r[0] - c[0]) * (r[0] - c[0]) + (r[1] - c[1]) * (r[1] - c[1]) + (r[2] - c[2]) * (r[2] - c[2]);
      const double v = std::exp(-d2 / (2.0 * width * width));
      phi.up()[p] = a * v;
      phi.down()[p] = b * v;
    }
    s.orbitals.push_back(std::move(phi));
    s.occupations.push_back(k == 0 ? 1.0 : 0.5);
  }
  orthonormalize(s.orbitals);
  return s;
}

double ExactIdentities::worst() const noexcept {
  return std::max({flip_zeeman, decomposition, pointwise, rho_pm_vs_dense, flip_kinetic, flip_density,
                   flip_magnetization, hermiticity});
}

ExactIdentities exact_identities(const Grid& g, const RealField& v, double mu, std::uint64_t seed) {
  ExactIdentities out;
  out.seed = seed;
  const OccupiedSet s = random_occupied_set(g, 3, seed);
  const VectorField b = random_vector_field(g, seed + 1000);
  const UField u = assemble_U(b, v, mu);
  out.flip_zeeman = check_flip_identity(s, u);

  const SpinDensityField r = density_from_orbitals(s);
  const ExternalEnergy e = external_energy(u, r);
  out.decomposition = std::abs(e.total - e.potential - e.zeeman) / (1.0 + std::abs(e.total));
  out.pointwise = std::max(0.0, check_pointwise_bounds(r).worst());

  const EigenvaluesPM pm = eigenvalues_pm(r);
  double rho_max = 0.0, diff = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    Eigen::Matrix2cd m;
    m << r.uu[p], cplx(r.ud_re[p], r.ud_im[p]), cplx(r.ud_re[p], -r.ud_im[p]), r.dd[p];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m, Eigen::EigenvaluesOnly);
    diff = std::max({diff, std::abs(es.eigenvalues()[0] - pm.minus[p]), std::abs(es.eigenvalues()[1] - pm.plus[p])});
    rho_max = std::max(rho_max, r.uu[p] + r.dd[p]);
  }
  out.rho_pm_vs_dense = diff / rho_max;

  const OccupiedSet f = flip(s);
  const SpinDensityField rf = density_from_orbitals(f);
  auto kinetic = [](const OccupiedSet& set) {
    double t = 0.0;
    for (std::size_t k = 0; k < set.size(); ++k)
      t += set.occupations[k] * -inner(set.orbitals[k], laplacian_apply(set.orbitals[k])).real();
    return t;
  };
  const double t0 = kinetic(s);
  out.flip_kinetic = std::abs(kinetic(f) - t0) / std::abs(t0);
  const VectorField m = magnetization(r), mf = magnetization(rf);
  for (std::size_t p = 0; p < g.size(); ++p) {
    out.flip_density = std::max(out.flip_density, std::abs(rf.uu[p] + rf.dd[p] - r.uu[p] - r.dd[p]));
    out.flip_magnetization = std::max(
        {out.flip_magnetization, std::abs(mf.x[p] + m.x[p]), std::abs(mf.y[p] + m.y[p]), std::abs(mf.z[p] + m.z[p])});
  }

  const MeanFieldOperator op = assemble_operator(Mode::full, u, &r, XcFunctional::xalpha());
  const OccupiedSet probe = random_occupied_set(g, 2, seed + 2000);
  const SpinorField& a = probe.orbitals[0];
  const SpinorField& c = probe.orbitals[1];
  const SpinorField ha = apply_H(op, a), hc = apply_H(op, c);
  out.hermiticity = std::abs(inner(a, hc) - std::conj(inner(c, ha))) / (norm(a) * norm(hc));
  return out;
}

double PointwiseBounds::worst() const noexcept { return std::max({offdiag_excess, minus_negative, plus_excess}); }

PointwiseBounds check_pointwise_bounds(const SpinDensityField& r) {
  const EigenvaluesPM pm = eigenvalues_pm(r);
  PointwiseBounds b{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                    -std::numeric_limits<double>::infinity()};
  for (std::size_t p = 0; p < r.uu.size(); ++p) {
    const double rho = r.uu[p] + r.dd[p];
    const double ud = std::hypot(r.ud_re[p], r.ud_im[p]);
    b.offdiag_excess = std::max({b.offdiag_excess, std::abs(r.uu[p]) - rho, std::abs(r.dd[p]) - rho, ud - rho});
    b.minus_negative = std::max(b.minus_negative, -pm.minus[p]);
    b.plus_excess = std::max(b.plus_excess, pm.plus[p] - rho);
  }
  return b;
}

double HoffmanOstenhof::margin(double slack) const noexcept {
  return std::max(gradient_up - kinetic_up * (1.0 + slack), gradient_down - kinetic_down * (1.0 + slack));
}

HoffmanOstenhof check_hoffman_ostenhof(const OccupiedSet& s) {
  const SpinDensityField r = density_from_orbitals(s);
  const Grid& g = r.grid;
  HoffmanOstenhof out;
  for (int channel = 0; channel < 2; ++channel) {
    const RealField& rho = channel == 0 ? r.uu : r.dd;
    RealField root(g);
    for (std::size_t p = 0; p < g.size(); ++p) root[p] = std::sqrt(std::max(rho[p], 0.0));
    const double gradient = integrate(gradient_norm_sq(root));
    double kinetic = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s.occupations[k] == 0.0) continue;
      ComplexField f(g);
      const auto src = channel == 0 ? s.orbitals[k].up() : s.orbitals[k].down();
      std::copy(src.begin(), src.end(), f.values.begin());
      kinetic += s.occupations[k] * -inner(f, laplacian_apply(f)).real();
    }
    (channel == 0 ? out.gradient_up : out.gradient_down) = gradient;
    (channel == 0 ? out.kinetic_up : out.kinetic_down) = kinetic;
  }
  return out;
}

TrialCoefficients gaussian_trial_coefficients(const Vec3& s) {
  TrialCoefficients c;
  for (double w : s) c.kinetic += 1.0 / (8.0 * w * w);
  // J = (1/2) E|X - Y|^{-1} with 1/|x| = (2/sqrt(pi)) int exp(-t^2 x^2) dt
  boost::math::quadrature::exp_sinh<double> quad;
  const double integral = quad.integrate([&](double t) {
    double v = 1.0;
    for (double w : s) v /= std::sqrt(1.0 + 4.0 * t * t * w * w);
    return v;
  });
  c.hartree = integral / std::sqrt(std::numbers::pi);
  c.power43 = std::pow(0.75, 1.5);
  for (double w : s) c.power43 *= std::pow(2.0 * std::numbers::pi * w * w, -1.0 / 6.0);
  return c;
}

TrialCoefficients grid_trial_coefficients(const Grid& g, const Vec3& s) {
  const Vec3 c = g.center();
  const RealField phi = sample(g, [&](const Vec3& r) {
    double v = 1.0;
    for (int a = 0; a < 3; ++a) {
      const double x = r[a] - c[a];
      v *= std::pow(2.0 * std::numbers::pi * s[a] * s[a], -0.25) * std::exp(-x * x / (4.0 * s[a] * s[a]));
    }
    return v;
  });
  TrialCoefficients out;
  out.kinetic = -0.5 * inner(phi, laplacian_apply(phi));
  RealField rho(g), p43(g);
  for (std::size_t p = 0; p < g.size(); ++p) {
    rho[p] = phi[p] * phi[p];
    p43[p] = std::pow(rho[p], 4.0 / 3.0);
  }
  PoissonOptions tight;
  tight.tol = 1e-12;
  out.hartree = hartree_energy(rho, hartree_potential(rho, tight));
  out.power43 = integrate(p43);
  return out;
}

double trial_energy(double lambda, double sigma, const TrialCoefficients& c, const XcFunctional& xc) {
  double e = lambda * sigma * sigma * c.kinetic + lambda * lambda * sigma * c.hartree;
  if (xc.active()) {
    if (xc.name != "xalpha") throw ConfigError("scaling trial: closed form available for xalpha only");
    e -= 0.5 * xc.c_x * std::pow(2.0 * lambda, 4.0 / 3.0) * sigma * c.power43;
  }
  return e;
}

double ScalingGridCheck::worst() const noexcept { return std::max({kinetic_rel, hartree_rel, power43_rel}); }

std::vector<double> default_sigmas() {
  std::vector<double> s;
  for (int i = 0; i <= 80; ++i) s.push_back(std::pow(10.0, -3.0 + 4.0 * i / 80.0));
  return s;
}

ScalingTrialReport scaling_trial(double lambda, const std::vector<double>& sigmas, const XcFunctional& xc,
                                 const std::vector<double>& aspects, const std::vector<int>& check_grids) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw ConfigError("scaling trial: requires 0 < lambda <= 1");
  if (sigmas.empty()) throw ConfigError("scaling trial: empty sigma list");
  ScalingTrialReport rep;
  rep.lambda = lambda;
  rep.sigmas = sigmas;
  rep.min_energy = std::numeric_limits<double>::infinity();
  for (double aspect : aspects) {
    ScalingProfileResult pr;
    pr.aspect = aspect;
    const double a = std::cbrt(1.0 / aspect);
    pr.widths = {a, a, a * aspect};
    pr.coefficients = gaussian_trial_coefficients(pr.widths);
    pr.min_energy = std::numeric_limits<double>::infinity();
    for (double sigma : sigmas) {
      const double e = trial_energy(lambda, sigma, pr.coefficients, xc);
      pr.energies.push_back(e);
      if (e < pr.min_energy) {
        pr.min_energy = e;
        pr.argmin_sigma = sigma;
      }
    }
    if (pr.min_energy < rep.min_energy) {
      rep.min_energy = pr.min_energy;
      rep.argmin_sigma = pr.argmin_sigma;
      rep.argmin_aspect = aspect;
    }
    rep.profiles.push_back(std::move(pr));
  }
  // The terms scale exactly with sigma, so the grid comparison is done once at unit width.
  const Vec3 unit{1.0, 1.0, 1.0};
  const TrialCoefficients exact = gaussian_trial_coefficients(unit);
  for (int n : check_grids) {
    const Grid g = Grid::centered(n, 14.0);
    const TrialCoefficients num = grid_trial_coefficients(g, unit);
    rep.grid_checks.push_back({n, g.length(), std::abs(num.kinetic / exact.kinetic - 1.0),
                               std::abs(num.hartree / exact.hartree - 1.0),
                               std::abs(num.power43 / exact.power43 - 1.0)});
  }
  return rep;
}

double check_aufbau(const std::vector<double>& eigenvalues, const std::vector<double>& occupations, double fermi,
                    double deg_tol) {
  if (eigenvalues.size() != occupations.size()) throw ContractViolation("check_aufbau: size mismatch");
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    const double e = eigenvalues[i];
    const double n = occupations[i];
    double v;
    if (n >= 1.0 - 1e-12)
      v = e - (fermi + deg_tol);
    else if (n <= 1e-12)
      v = (fermi - deg_tol) - e;
    else
      v = std::abs(e - fermi) - deg_tol;
    worst = std::max(worst, v);
  }
  return worst;
}

int coleman_violations(const ScfState& s, double lambda) {
  int bad = 0;
  for (const auto* history : {&s.history, &s.other_history})
    for (const auto& h : *history) {
      const auto& c = h.coleman;
      if (c.min_occupation < 0.0 || c.max_occupation > 1.0 || std::abs(c.trace - lambda) > 1e-10 ||
          c.max_orthonormality_error > 1e-8)
        ++bad;
    }
  return bad;
}

double DerivativeCheck::error() const noexcept { return std::abs(analytic - finite_difference); }

namespace {

SpinDensityField axpy(const SpinDensityField& r, double t, const SpinDensityField& d) {
  SpinDensityField out(r.grid);
  for (std::size_t p = 0; p < r.uu.size(); ++p) {
    out.uu[p] = r.uu[p] + t * d.uu[p];
    out.dd[p] = r.dd[p] + t * d.dd[p];
    out.ud_re[p] = r.ud_re[p] + t * d.ud_re[p];
    out.ud_im[p] = r.ud_im[p] + t * d.ud_im[p];
  }
  return out;
}

}  // namespace

DerivativeCheck check_xc_derivative(const SpinDensityField& r, const SpinDensityField& dr, const XcFunctional& f,
                                    double step) {
  require_same_grid(r.grid, dr.grid, "check_xc_derivative");
  DerivativeCheck out;
  out.step = step;
  out.analytic = trace_product(vxc_matrix(r, f), dr);
  out.finite_difference = (exc_lsda(axpy(r, step, dr), f) - exc_lsda(axpy(r, -step, dr), f)) / (2.0 * step);
  return out;
}

DerivativeCheck check_energy_derivative(const ScfState& state, const ScfSetup& setup, std::uint64_t seed,
                                        double step) {
  if (setup.mode == Mode::collinear || setup.mode == Mode::unpolarized)
    throw ConfigError("energy derivative check: restricted tiers are not supported");
  const OccupiedSet& s = state.occupied;
  const Grid& g = setup.grid;
  std::vector<std::size_t> occ, virt;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s.occupations[k] > 0.0) occ.push_back(k);
    if (s.occupations[k] < 1.0) virt.push_back(k);
  }
  if (occ.empty() || virt.empty()) throw ConfigError("energy derivative check: needs occupied and virtual orbitals");

  PoissonOptions poisson = setup.poisson;
  poisson.tol = std::min(poisson.tol, 1e-11);
  const BlockFlags blocks = blocks_for(setup.mode);
  const MeanFieldOperator op = assemble_operator(setup.mode, setup.u, &state.density, setup.xc, poisson);

  // dgamma = sum c_ia |Phi_i><Phi_a| + h.c. + sum d_i |Phi_i><Phi_i|
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  SpinDensityField dr(g);
  double dkinetic = 0.0;
  double analytic = 0.0;
  const double scale = 1.0 / std::sqrt(static_cast<double>(occ.size() * virt.size()));
  for (std::size_t i : occ)
    for (std::size_t a : virt) {
      if (i == a) continue;
      const cplx c(normal(rng) * scale, normal(rng) * scale);
      const SpinorField& pi = s.orbitals[i];
      const SpinorField& pa = s.orbitals[a];
      const SpinorField hpi = apply_H(op, pi);
      const SpinorField lap = laplacian_apply(pi);
      analytic += 2.0 * (c * inner(pa, hpi)).real();
      dkinetic += 2.0 * (c * -0.5 * inner(pa, lap)).real();
      for (std::size_t p = 0; p < g.size(); ++p) {
        const cplx iu = pi.up()[p], id = pi.down()[p], au = pa.up()[p], ad = pa.down()[p];
        dr.uu[p] += 2.0 * (c * iu * std::conj(au)).real();
        dr.dd[p] += 2.0 * (c * id * std::conj(ad)).real();
        const cplx ud = c * iu * std::conj(ad) + std::conj(c) * au * std::conj(id);
        dr.ud_re[p] += ud.real();
        dr.ud_im[p] += ud.imag();
      }
    }

  // occupation changes of the occupied orbitals keep R + t dR positive for small t
  for (std::size_t i : occ) {
    const double d = 0.5 * normal(rng);
    const SpinorField& pi = s.orbitals[i];
    analytic += d * inner(pi, apply_H(op, pi)).real();
    dkinetic += d * -0.5 * inner(pi, laplacian_apply(pi)).real();
    for (std::size_t p = 0; p < g.size(); ++p) {
      const cplx u = pi.up()[p], w = pi.down()[p];
      dr.uu[p] += d * std::norm(u);
      dr.dd[p] += d * std::norm(w);
      const cplx ud = d * u * std::conj(w);
      dr.ud_re[p] += ud.real();
      dr.ud_im[p] += ud.imag();
    }
  }

  auto energy = [&](double t) {
    const SpinDensityField rt = axpy(state.density, t, dr);
    double e = t * dkinetic;
    if (blocks.external) e += external_energy(setup.u, rt).total;
    if (blocks.hartree) {
      const RealField rho = rt.trace();
      e += hartree_energy(rho, hartree_potential(rho, poisson, &op.hartree.phi));
    }
    if (blocks.xc) e += exc_lsda(rt, setup.xc);
    return e;
  };
  DerivativeCheck out;
  out.seed = seed;
  out.step = step;
  out.analytic = analytic;
  out.finite_difference = (energy(step) - energy(-step)) / (2.0 * step);
  return out;
}

DecayFit fit_decay(const RealField& rho, const std::vector<Nucleus>& nuclei) {
  const Grid& g = rho.grid;
  const double h = g.spacing();
  Vec3 centre = g.center();
  if (!nuclei.empty()) {
    double z = 0.0;
    centre = {0.0, 0.0, 0.0};
    for (const auto& nuc : nuclei) {
      z += nuc.charge;
      for (int a = 0; a < 3; ++a) centre[a] += nuc.charge * nuc.position[a];
    }
    for (double& c : centre) c /= z;
  }
  const Vec3 box = g.center();
  double offset = 0.0;
  for (int a = 0; a < 3; ++a) offset = std::max(offset, std::abs(centre[a] - box[a]));
  DecayFit fit;
  fit.r_min = 2.0;
  fit.r_max = 0.8 * 0.5 * g.length() - offset;
  if (fit.r_max <= fit.r_min)
    throw ConfigError(fmt::format("decay fit: box too small, window [{}, {}] is empty", fit.r_min, fit.r_max));

  const auto shells = static_cast<std::size_t>(std::ceil(fit.r_max / h)) + 1;
  std::vector<double> sum(shells, 0.0), rsum(shells, 0.0);
  std::vector<int> count(shells, 0);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const Vec3 r = g.position(p);
    const double d = std::hypot(r[0] - centre[0], r[1] - centre[1], r[2] - centre[2]);
    if (d < fit.r_min || d > fit.r_max) continue;
    bool near = false;
    for (const auto& nuc : nuclei)
      near = near || std::hypot(r[0] - nuc.position[0], r[1] - nuc.position[1], r[2] - nuc.position[2]) < fit.r_min;
    if (near) continue;
    const auto s = static_cast<std::size_t>(d / h);
    sum[s] += rho[p];
    rsum[s] += d;
    ++count[s];
  }
  for (std::size_t s = 0; s < shells; ++s) {
    if (count[s] == 0) continue;
    const double avg = sum[s] / count[s];
    if (!(avg > 0.0)) continue;
    fit.radii.push_back(rsum[s] / count[s]);
    fit.log_density.push_back(std::log(avg));
  }
  const std::size_t m = fit.radii.size();
  if (m < 4)
    throw ConfigError(fmt::format("decay fit: only {} usable shells in [{}, {}], need 4", m, fit.r_min, fit.r_max));
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += fit.radii[i];
    my += fit.log_density[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = fit.radii[i] - mx, dy = fit.log_density[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.correlation = syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
  return fit;
}

const SweepPoint* find_point(const SweepReport& report, double lambda) {
  for (const auto& p : report.points)
    if (std::abs(p.lambda - lambda) <= 1e-12 * std::max(1.0, lambda)) return &p;
  return nullptr;
}

SweepReport sweep_lambda(const ScfProblem& base, const std::vector<double>& lambdas, double tol_bind) {
  if (lambdas.empty()) throw ConfigError("sweep: empty lambda list");
  SweepReport rep;
  rep.lambdas = lambdas;
  rep.tol_bind = tol_bind;
  rep.grid = fmt::format("n={} L={}", base.grid.n(), base.grid.length());
  rep.mode = to_string(base.mode);

  std::vector<double> all;
  for (double l : lambdas) {
    if (!(l > 0.0)) throw ConfigError("sweep: lambda values must be positive");
    all.push_back(l);
    all.push_back(0.5 * l);
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end(),
                        [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, a); }),
            all.end());

  for (double l : all) {
    SweepPoint pt;
    pt.lambda = l;
    ScfProblem p = base;
    p.lambda = l;
    try {
      const ScfState s = scf_solve(p);
      pt.energy = s.energy.total;
      pt.converged = s.converged;
      pt.iterations = s.iterations;
      pt.start = s.start;
      pt.coleman_violations += coleman_violations(s, l);
      pt.iterates_checked += static_cast<int>(s.history.size() + s.other_history.size());
    } catch (const std::runtime_error& e) {
      pt.error = e.what();
    }
    p.mode = Mode::infinity;
    try {
      const ScfState s = scf_solve(p);
      pt.energy_inf = s.energy.total;
      pt.converged_inf = s.converged;
      pt.iterations_inf = s.iterations;
      pt.coleman_violations += coleman_violations(s, l);
      pt.iterates_checked += static_cast<int>(s.history.size() + s.other_history.size());
    } catch (const std::runtime_error& e) {
      pt.error += (pt.error.empty() ? "" : "; ") + std::string("infinity: ") + e.what();
    }
    rep.points.push_back(pt);
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double l : lambdas) {
    const SweepPoint* p = find_point(rep, l);
    rep.checks.push_back(make_check(fmt::format("sign lambda={}", l), CheckClass::soft,
                                    p->converged_inf ? p->energy_inf : nan, 0.0, "I_inf < 0"));
    const bool both = p->converged && p->converged_inf;
    rep.checks.push_back(make_check(fmt::format("binding lambda={}", l), CheckClass::soft,
                                    both ? p->energy - p->energy_inf + tol_bind : nan, 0.0,
                                    both ? fmt::format("I - I_inf = {:.6e}", p->energy - p->energy_inf) : ""));
    const SweepPoint* h = find_point(rep, 0.5 * l);
    const bool sub = p->converged && h->converged && h->converged_inf;
    rep.checks.push_back(make_check(fmt::format("subadditive lambda={} mu={}", l, 0.5 * l), CheckClass::soft,
                                    sub ? p->energy - h->energy - h->energy_inf - tol_bind : nan, 0.0,
                                    "I_lambda <= I_mu + I_inf_(lambda-mu)"));
  }
  const SweepPoint* prev = nullptr;
  for (const auto& pt : rep.points) {
    if (!pt.converged) continue;
    if (prev)
      rep.checks.push_back(make_check(fmt::format("monotone lambda={} -> {}", prev->lambda, pt.lambda),
                                      CheckClass::soft, pt.energy - prev->energy - tol_bind, 0.0,
                                      "I non-increasing in lambda"));
    prev = &pt;
  }
  return rep;
}

}  // namespace lsda
