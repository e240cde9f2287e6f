#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lsda/error.hpp"
#include "lsda/output.hpp"
#include "lsda/verify.hpp"

using namespace lsda;

namespace {

OccupiedSet single_channel(const Grid& g, const std::vector<RealField>& profiles, std::vector<double> occupations) {
  OccupiedSet s;
  for (const auto& f : profiles) {
    SpinorField phi(g);
    for (std::size_t p = 0; p < g.size(); ++p) phi.up()[p] = f[p];
    s.orbitals.push_back(phi);
  }
  orthonormalize(s.orbitals);
  s.occupations = std::move(occupations);
  return s;
}

RealField gaussian(const Grid& g, double width) {
  return sample(g, [&](const Vec3& x) { return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (2 * width * width)); });
}

ScfProblem hydrogen(int n, double length, Mode mode) {
  ScfProblem p;
  p.grid = Grid::centered(n, length);
  p.ext.nuclei = {{1, {0.0, 0.0, 0.0}}};
  p.mode = mode;
  return p;
}

}  // namespace

TEST_CASE("check verdicts") {
  CHECK(make_check("a", CheckClass::exact, 1e-13, 1e-12).verdict == Verdict::pass);
  CHECK(make_check("a", CheckClass::exact, 1e-11, 1e-12).verdict == Verdict::fail);
  CHECK(make_check("a", CheckClass::soft, 1.0, 0.0).verdict == Verdict::soft_fail);
  CHECK(make_check("a", CheckClass::soft, std::nan(""), 0.0).verdict == Verdict::not_evaluated);
  CHECK(to_string(Verdict::soft_fail) == "soft-fail");
  CHECK(to_string(Verdict::pass) == "pass");
}

TEST_CASE("exact identities hold to rounding on random sets and fields") {
  const Grid g = Grid::centered(8, 6.0);
  ExternalFields ext;
  ext.nuclei = {{1, {0.2, 0.0, -0.3}}};
  const RealField v = nuclear_potential(ext, g);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const ExactIdentities e = exact_identities(g, v, kBohrMagneton, seed);
    CHECK(e.worst() <= 1e-12);
  }
}

TEST_CASE("flip identity with no field and with a collinear field") {
  const Grid g = Grid::centered(6, 5.0);
  const RealField v = sample(g, [](const Vec3& x) { return -1.0 / (1.0 + x[2] * x[2]); });
  const OccupiedSet s = random_occupied_set(g, 3, 5);
  CHECK(check_flip_identity(s, assemble_U(VectorField(g), v, kBohrMagneton)) <= 1e-14);
  VectorField b(g);
  b.z = sample(g, [](const Vec3& x) { return std::sin(x[0]); });
  const OccupiedSet up = single_channel(g, {gaussian(g, 1.0)}, {0.8});
  CHECK(check_flip_identity(up, assemble_U(b, v, kBohrMagneton)) <= 1e-14);
}

TEST_CASE("pointwise bounds") {
  const Grid g = Grid::centered(6, 5.0);
  for (std::uint64_t seed : {1u, 2u, 3u}) CHECK(check_pointwise_bounds(density_from_orbitals(random_occupied_set(g, 4, seed))).worst() <= 1e-15);
  const SpinDensityField up = density_from_orbitals(single_channel(g, {gaussian(g, 1.0)}, {1.0}));
  const EigenvaluesPM pm = eigenvalues_pm(up);
  const RealField rho = up.trace();
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(pm.plus[i] == rho[i]);
}

TEST_CASE("Hoffman-Ostenhof inequality") {
  // a single orbital saturates the inequality up to the discretization error
  double previous = 1.0;
  for (int n : {24, 48}) {
    const Grid g = Grid::centered(n, 10.0);
    const HoffmanOstenhof one = check_hoffman_ostenhof(single_channel(g, {gaussian(g, 1.0)}, {1.0}));
    CHECK(one.kinetic_down == 0.0);
    CHECK(one.gradient_down == 0.0);
    const double gap = std::abs(one.gradient_up / one.kinetic_up - 1.0);
    CHECK(gap < 0.1);
    CHECK(gap < 0.3 * previous);
    previous = gap;
  }

  const Grid g = Grid::centered(24, 10.0);
  const RealField s = gaussian(g, 1.0);
  const RealField p = sample(g, [&](const Vec3& x) { return x[0] * std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2); });
  const HoffmanOstenhof two = check_hoffman_ostenhof(single_channel(g, {s, p}, {1.0, 1.0}));
  CHECK(two.gradient_up < 0.9 * two.kinetic_up);
  CHECK(two.margin() <= 0.0);

  const OccupiedSet mixed = gaussian_mixture_set(g, 2, 1.0, 4);
  CHECK(check_hoffman_ostenhof(mixed).margin() <= 0.0);
}

TEST_CASE("Gaussian trial terms match closed forms and grid sums") {
  const TrialCoefficients c = gaussian_trial_coefficients({1.0, 1.0, 1.0});
  CHECK(c.kinetic == doctest::Approx(3.0 / 8.0).epsilon(1e-14));
  CHECK(c.hartree == doctest::Approx(1.0 / (2.0 * std::sqrt(M_PI))).epsilon(1e-10));
  CHECK(c.power43 == doctest::Approx(std::pow(0.75, 1.5) * std::pow(2.0 * M_PI, -0.5)).epsilon(1e-14));

  const TrialCoefficients prolate = gaussian_trial_coefficients({0.8, 0.8, 1.5625});
  const TrialCoefficients grid = grid_trial_coefficients(Grid::centered(64, 18.0), {0.8, 0.8, 1.5625});
  CHECK(grid.kinetic == doctest::Approx(prolate.kinetic).epsilon(1e-2));
  CHECK(grid.hartree == doctest::Approx(prolate.hartree).epsilon(1e-2));
  CHECK(grid.power43 == doctest::Approx(prolate.power43).epsilon(1e-2));
}

TEST_CASE("scaling trial state") {
  const ScalingTrialReport low = scaling_trial(0.1, default_sigmas(), XcFunctional::xalpha(), {1.0}, {32, 48});
  CHECK(low.min_energy < 0.0);
  // sigma -> 0: the xc term dominates and the energy approaches zero from below
  const auto& e = low.profiles.front().energies;
  CHECK(e.front() < 0.0);
  CHECK(std::abs(e.front()) < std::abs(e[e.size() / 2]));
  CHECK(low.grid_checks.back().worst() < 1e-2);
  CHECK(low.grid_checks.back().worst() < low.grid_checks.front().worst());

  const ScalingTrialReport off = scaling_trial(0.1, default_sigmas(), XcFunctional::none(), {1.0, 4.0}, {});
  for (const auto& prof : off.profiles)
    for (double x : prof.energies) CHECK(x > 0.0);

  const ScalingTrialReport one = scaling_trial(1.0, default_sigmas(), XcFunctional::xalpha(), {1.0, 16.0}, {});
  CHECK(one.profiles.front().min_energy > 0.0);
  CHECK(one.min_energy < 0.0);
  CHECK(one.argmin_aspect == 16.0);

  CHECK_THROWS_AS(scaling_trial(1.5, default_sigmas(), XcFunctional::xalpha()), ConfigError);
}

TEST_CASE("aufbau check") {
  CHECK(check_aufbau({-1.0, -0.5, -0.2}, {1.0, 0.5, 0.0}, -0.5, 1e-6) <= 0.0);
  CHECK(check_aufbau({-1.0, -0.5, -0.5, 0.1}, {1.0, 0.5, 0.5, 0.0}, -0.5, 1e-6) <= 0.0);
  CHECK(check_aufbau({-1.0, -0.5, -0.2}, {0.5, 1.0, 0.0}, -0.5, 1e-6) > 0.0);
  CHECK(check_aufbau({-1.0, -0.5, -0.2}, {1.0, 0.0, 0.5}, -0.5, 1e-6) > 0.0);
}

TEST_CASE("decay of the noninteracting hydrogen density") {
  ScfProblem p = hydrogen(32, 16.0, Mode::noninteracting);
  p.ext.softening = 0.1;
  const ScfState s = scf_solve(p);
  const DecayFit fit = fit_decay(s.density.trace(), p.ext.nuclei);
  CHECK(fit.slope < 0.0);
  CHECK(fit.correlation < -0.99);
  CHECK(fit.radii.size() >= 4);
  const double ratio = -fit.slope / 2.0;
  CHECK(ratio < 1.5);
  CHECK(ratio > 1.0 / 1.5);

  const Grid tiny = Grid::centered(8, 5.0);
  CHECK_THROWS_AS(fit_decay(RealField(tiny, 1.0), p.ext.nuclei), ConfigError);
}

TEST_CASE("energy derivative check at a converged state") {
  const ScfProblem p = hydrogen(10, 8.0, Mode::full);
  const ScfState s = scf_solve(p);
  const DerivativeCheck d = check_energy_derivative(s, prepare(p), 1);
  CHECK(d.error() < 1e-5);
  CHECK(std::abs(d.analytic) > 1e-4);
  CHECK(coleman_violations(s, 1.0) == 0);
  CHECK(coleman_violations(s, 0.9) > 0);
  CHECK_THROWS_AS(check_energy_derivative(s, prepare(hydrogen(10, 8.0, Mode::collinear)), 1), ConfigError);
}

TEST_CASE("small lambda sweep") {
  const SweepReport r = sweep_lambda(hydrogen(8, 8.0, Mode::full), {0.5, 1.0}, 1e-4);
  REQUIRE(r.points.size() == 3);
  CHECK(r.points[0].lambda == 0.25);
  CHECK(r.points[2].lambda == 1.0);
  for (const auto& pt : r.points) {
    CHECK(pt.converged);
    CHECK(pt.converged_inf);
  }
  REQUIRE(find_point(r, 0.5) != nullptr);
  CHECK(find_point(r, 0.75) == nullptr);
  for (const auto& c : r.checks) {
    CHECK(c.kind == CheckClass::soft);
    CHECK(c.verdict != Verdict::fail);
  }
  const SweepPoint& one = *find_point(r, 1.0);
  CHECK(one.energy < one.energy_inf);
  const std::string csv = sweep_csv(r);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
