#include <doctest.h>

#include <cmath>

#include "lsda/error.hpp"
#include "lsda/scf.hpp"
#include "lsda/verify.hpp"

using namespace lsda;

namespace {

ScfProblem hydrogen(int n, double length, Mode mode, double lambda = 1.0) {
  ScfProblem p;
  p.grid = Grid::centered(n, length);
  p.ext.nuclei = {{1, {0.0, 0.0, 0.0}}};
  p.mode = mode;
  p.lambda = lambda;
  return p;
}

MagneticFieldSpec uniform_z(double b0) {
  MagneticFieldSpec f;
  f.kind = MagneticFieldSpec::Kind::uniform;
  f.amplitude = b0;
  f.axis = {0.0, 0.0, 1.0};
  return f;
}

const ScfState& full_state() {
  static const ScfState s = scf_solve(hydrogen(12, 10.0, Mode::full));
  return s;
}

const ScfState& infinity_state() {
  static const ScfState s = scf_solve(hydrogen(12, 10.0, Mode::infinity));
  return s;
}

}  // namespace

TEST_CASE("occupation follows the Aufbau rule with equal sharing at the frontier") {
  Occupation o = occupy({-1.0, -1.0, -0.3, 0.1}, 2.0, 1e-6);
  CHECK(o.occupations == std::vector<double>{1.0, 1.0, 0.0, 0.0});
  CHECK(o.fermi == -1.0);

  o = occupy({-1.0, -0.5, -0.2, 0.1}, 1.5, 1e-6);
  CHECK(o.occupations == std::vector<double>{1.0, 0.5, 0.0, 0.0});
  CHECK(o.fermi == -0.5);

  o = occupy({-1.0, -0.5, -0.5, 0.1}, 2.0, 1e-6);
  CHECK(o.occupations == std::vector<double>{1.0, 0.5, 0.5, 0.0});
  CHECK(o.fermi == -0.5);

  o = occupy({-0.7, -0.7 + 1e-9, -0.2}, 0.3, 1e-6);
  CHECK(o.occupations[0] == doctest::Approx(0.15));
  CHECK(o.occupations[1] == doctest::Approx(0.15));
  CHECK(o.occupations[0] + o.occupations[1] + o.occupations[2] == doctest::Approx(0.3).epsilon(1e-15));

  CHECK_THROWS_AS(occupy({-1.0, -0.5}, 2.5, 1e-6), ConfigError);
}

TEST_CASE("noninteracting hydrogen converges in one step to the lowest eigenvalue") {
  const ScfState s = scf_solve(hydrogen(10, 8.0, Mode::noninteracting));
  CHECK(s.converged);
  CHECK(s.iterations == 1);
  CHECK(s.energy.total == doctest::Approx(s.orbital_energies[0]).epsilon(1e-10));
  CHECK(s.energy.hartree == 0.0);
  CHECK(s.energy.xc == 0.0);
  CHECK(s.energy.zeeman == 0.0);
}

TEST_CASE("uniform field lowers the noninteracting energy by mu B0 with a pure spin-up ground state") {
  const double b0 = 0.1;
  ScfProblem p = hydrogen(10, 8.0, Mode::noninteracting);
  p.opt.eig.tol = 1e-10;
  const double e0 = scf_solve(p).energy.total;
  p.ext.field = uniform_z(b0);
  const ScfState s = scf_solve(p);
  CHECK(s.energy.total == doctest::Approx(e0 - kBohrMagneton * b0).epsilon(1e-9));
  const VectorField m = magnetization(s.density);
  const RealField rho = s.density.trace();
  CHECK(integrate(m.z) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(integrate(s.density.dd) < 1e-9);
  for (std::size_t i = 0; i < rho.size(); ++i) CHECK(std::abs(m.z[i] - rho[i]) < 1e-8);
}

TEST_CASE("flipping a state changes the energy by twice mu integral B.m") {
  const Grid g = Grid::centered(10, 8.0);
  ScfProblem p;
  p.grid = g;
  p.ext.nuclei = {{1, {0.0, 0.0, 0.0}}};
  p.ext.field.kind = MagneticFieldSpec::Kind::gaussian;
  p.ext.field.amplitude = 0.4;
  p.ext.field.axis = {0.6, 0.0, 0.8};
  p.ext.field.width = 2.0;
  const ScfSetup setup = prepare(p);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const OccupiedSet s = random_occupied_set(g, 3, seed);
    const EnergyBreakdown e = total_energy(s, setup);
    const EnergyBreakdown ef = total_energy(flip(s), setup);
    const VectorField m = magnetization(density_from_orbitals(s));
    RealField bm(g);
    for (std::size_t i = 0; i < g.size(); ++i) bm[i] = setup.b.x[i] * m.x[i] + setup.b.y[i] * m.y[i] + setup.b.z[i] * m.z[i];
    const double shift = 2.0 * kBohrMagneton * integrate(bm);
    CHECK(std::abs(ef.total - e.total - shift) < 1e-12 * (1.0 + std::abs(e.total)));
    CHECK(ef.kinetic == doctest::Approx(e.kinetic).epsilon(1e-13));
  }
}

TEST_CASE("energy breakdown of zero occupations is zero") {
  const ScfProblem p = hydrogen(6, 6.0, Mode::full);
  OccupiedSet s = random_occupied_set(p.grid, 2, 1);
  s.occupations = {0.0, 0.0};
  const EnergyBreakdown e = total_energy(s, prepare(p));
  CHECK(e.kinetic == 0.0);
  CHECK(e.hartree == 0.0);
  CHECK(e.v_ext == 0.0);
  CHECK(e.zeeman == 0.0);
  CHECK(e.xc == 0.0);
  CHECK(e.total == 0.0);
}

TEST_CASE("unpolarized tier ignores the magnetic field") {
  ScfProblem p = hydrogen(10, 8.0, Mode::unpolarized);
  p.ext.field = uniform_z(0.2);
  const ScfState s = scf_solve(p);
  CHECK(s.converged);
  CHECK(s.energy.zeeman == 0.0);
  for (std::size_t i = 0; i < s.density.uu.size(); ++i) CHECK(std::abs(s.density.uu[i] - s.density.dd[i]) < 1e-12);
  p.ext.field = {};
  CHECK(scf_solve(p).energy.total == doctest::Approx(s.energy.total).epsilon(1e-12));
}

TEST_CASE("collinear tier keeps the spin density diagonal") {
  ScfProblem p = hydrogen(10, 8.0, Mode::collinear);
  p.ext.field = uniform_z(0.1);
  const ScfState s = scf_solve(p);
  CHECK(s.converged);
  for (std::size_t i = 0; i < s.density.uu.size(); ++i) {
    CHECK(s.density.ud_re[i] == 0.0);
    CHECK(s.density.ud_im[i] == 0.0);
  }
}

TEST_CASE("full problem binds below the problem at infinity") {
  const ScfState& s = full_state();
  const ScfState& inf = infinity_state();
  REQUIRE(s.converged);
  REQUIRE(inf.converged);
  CHECK(s.energy.total < inf.energy.total);
  CHECK(inf.energy.v_ext == 0.0);
  CHECK(inf.energy.zeeman == 0.0);
}

TEST_CASE("converged states satisfy the breakdown, Coleman and consistency invariants") {
  for (const ScfState* s : {&full_state(), &infinity_state()}) {
    const EnergyBreakdown& e = s->energy;
    CHECK(std::abs(e.total - e.sum_of_parts()) <= 1e-10 * std::abs(e.total));
    CHECK(e.hartree >= 0.0);
    CHECK(e.xc <= 0.0);
    CHECK(coleman_violations(*s, 1.0) == 0);
    for (const auto& rec : s->history) {
      CHECK(rec.coleman.min_occupation >= 0.0);
      CHECK(rec.coleman.max_occupation <= 1.0);
      CHECK(std::abs(rec.coleman.trace - 1.0) <= 1e-10);
      CHECK(rec.coleman.max_orthonormality_error <= 1e-8);
    }
    const SpinDensityField r = density_from_orbitals(s->occupied);
    for (std::size_t i = 0; i < r.uu.size(); ++i) {
      CHECK(std::abs(r.uu[i] - s->density.uu[i]) < 1e-14);
      CHECK(std::abs(r.ud_re[i] - s->density.ud_re[i]) < 1e-14);
    }
  }
  CHECK(full_state().fermi < 0.0);
}

TEST_CASE("initial densities carry lambda and follow the field when aligned") {
  ScfProblem p = hydrogen(8, 8.0, Mode::full, 0.7);
  p.ext.field.kind = MagneticFieldSpec::Kind::uniform;
  p.ext.field.amplitude = 0.3;
  p.ext.field.axis = {1.0, 0.0, 0.0};
  const ScfSetup setup = prepare(p);
  const SpinDensityField plain = initial_density(p, setup, false);
  const SpinDensityField aligned = initial_density(p, setup, true);
  CHECK(integrate(plain.trace()) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(integrate(aligned.trace()) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(integrate(magnetization(plain).x) == doctest::Approx(0.0));
  CHECK(integrate(magnetization(aligned).x) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("scf reports non-convergence and rejects bad input") {
  ScfProblem p = hydrogen(8, 8.0, Mode::full);
  p.opt.max_iter = 2;
  CHECK_THROWS_AS(scf_solve(p), SolverError);
  p.opt.max_iter = 300;
  p.lambda = 0.0;
  CHECK_THROWS_AS(scf_solve(p), ConfigError);
  p.lambda = 1.0;
  p.opt.mix_beta = 0.0;
  CHECK_THROWS_AS(scf_solve(p), ConfigError);
  CHECK(parse_starts("default") == Starts::standard);
  CHECK(parse_starts("aligned") == Starts::aligned);
  CHECK(parse_starts("both") == Starts::both);
  CHECK_THROWS_AS(parse_starts("sideways"), ConfigError);
}

TEST_CASE("scf is deterministic") {
  const ScfProblem p = hydrogen(8, 8.0, Mode::full, 0.5);
  const ScfState a = scf_solve(p), b = scf_solve(p);
  CHECK(a.energy.total == b.energy.total);
  CHECK(a.iterations == b.iterations);
  CHECK(a.density.uu.values == b.density.uu.values);
}
