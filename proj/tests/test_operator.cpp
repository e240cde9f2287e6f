#include <doctest.h>

#include <cmath>
#include <random>

#include "lsda/error.hpp"
#include "lsda/operator.hpp"
#include "lsda/verify.hpp"

using namespace lsda;

namespace {

RealField gaussian_density(const Grid& g, double alpha) {
  const double c = std::pow(alpha / M_PI, 1.5);
  return sample(g, [&](const Vec3& x) { return c * std::exp(-alpha * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2])); });
}

SpinorField random_spinor(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  SpinorField s(g);
  for (auto& v : s.data) v = {nd(rng), nd(rng)};
  return s;
}

UField zero_u(const Grid& g) { return assemble_U(VectorField(g), RealField(g), kBohrMagneton); }

}  // namespace

TEST_CASE("nuclear potential values") {
  const Grid g = Grid::build(3, 4.0, {-2.0, -2.0, -2.0});  // nodes at -1, 0, 1
  const std::size_t centre = g.index(1, 1, 1);
  ExternalFields ext;
  ext.softening = 0.0;
  ext.nuclei = {{1, {0.0, 0.0, -2.0}}};
  CHECK(nuclear_potential(ext, g)[centre] == doctest::Approx(-0.5).epsilon(1e-15));

  ext.nuclei = {{1, {0.6, 0.8, 0.0}}, {1, {1.2, 1.6, 0.0}}};
  CHECK(nuclear_potential(ext, g)[centre] == doctest::Approx(-1.5).epsilon(1e-15));

  ext.softening = 1.0;
  ext.nuclei = {{1, {0.0, 0.0, 0.0}}};
  const RealField v = nuclear_potential(ext, g);
  CHECK(v[centre] == doctest::Approx(-1.0).epsilon(1e-15));
  for (double x : v.values) CHECK(x <= 0.0);

  ext.softening = 0.0;
  CHECK_THROWS_AS(nuclear_potential(ext, g), ConfigError);

  ext.softening = -1.0;  // h/2
  CHECK(nuclear_potential(ext, g)[centre] == doctest::Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("Hartree potential of zero density vanishes") {
  const Grid g = Grid::centered(8, 6.0);
  const HartreeSolution sol = hartree_potential(RealField(g));
  for (double x : sol.phi.values) CHECK(x == 0.0);
  for (double x : sol.potential.values) CHECK(x == 0.0);
  CHECK(hartree_energy(RealField(g), sol) == 0.0);
}

TEST_CASE("Hartree potential of a Gaussian approaches erf(sqrt(alpha) r)/r") {
  double previous = 1e300;
  for (int n : {23, 47}) {
    const Grid g = Grid::centered(n, 12.0);
    const HartreeSolution sol = hartree_potential(gaussian_density(g, 1.0), {1e-11, 10000});
    double worst = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) {
      const Vec3 x = g.position(p);
      const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
      if (r > 4.0) continue;
      const double exact = r < 1e-12 ? 2.0 / std::sqrt(M_PI) : std::erf(r) / r;
      worst = std::max(worst, std::abs(sol.phi[p] - exact));
    }
    CAPTURE(n);
    CHECK(worst < 5e-2);
    CHECK(worst < 0.5 * previous);
    previous = worst;
  }
}

TEST_CASE("Gaussian self-energy matches sqrt(alpha / 2 pi) within 1%") {
  const Grid g = Grid::centered(48, 16.0);
  for (double alpha : {1.0}) {
    const RealField rho = gaussian_density(g, alpha);
    const double j = hartree_energy(rho, hartree_potential(rho));
    CHECK(std::abs(j / std::sqrt(alpha / (2.0 * M_PI)) - 1.0) < 1e-2);
  }
  // J is quadratic in rho
  const Grid c = Grid::centered(16, 12.0);
  const RealField rho = gaussian_density(c, 1.0);
  RealField half = rho;
  for (double& x : half.values) x *= 0.5;
  const double j1 = hartree_energy(rho, hartree_potential(rho, {1e-12, 10000}));
  const double jh = hartree_energy(half, hartree_potential(half, {1e-12, 10000}));
  CHECK(jh == doctest::Approx(0.25 * j1).epsilon(1e-9));
}

TEST_CASE("Hartree potential is the gradient of the discrete energy") {
  const Grid g = Grid::centered(14, 10.0);
  // off-centre charge makes the boundary data depend on rho
  RealField rho = sample(g, [](const Vec3& x) {
    return std::exp(-(x[0] - 1.0) * (x[0] - 1.0) - x[1] * x[1] - (x[2] + 0.5) * (x[2] + 0.5));
  });
  const RealField drho = sample(g, [](const Vec3& x) { return std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1])) * x[2]; });
  const PoissonOptions opt{1e-13, 20000};
  const HartreeSolution sol = hartree_potential(rho, opt);
  const double analytic = inner(sol.potential, drho);
  const double t = 1e-3;
  RealField plus = rho, minus = rho;
  for (std::size_t p = 0; p < g.size(); ++p) {
    plus[p] += t * drho[p];
    minus[p] -= t * drho[p];
  }
  const double fd = (hartree_energy(plus, hartree_potential(plus, opt)) -
                     hartree_energy(minus, hartree_potential(minus, opt))) /
                    (2.0 * t);
  CHECK(std::abs(fd - analytic) < 1e-8 * (1.0 + std::abs(analytic)));
}

TEST_CASE("Hartree solve refuses to stop early silently") {
  const Grid g = Grid::centered(16, 10.0);
  CHECK_THROWS_AS(hartree_potential(gaussian_density(g, 1.0), {1e-14, 3}), SolverError);
}

TEST_CASE("pure kinetic operator on a discrete Dirichlet mode") {
  const Grid g = Grid::centered(7, 5.0);
  const MeanFieldOperator op = assemble_operator(Mode::noninteracting, zero_u(g), nullptr, XcFunctional::none());
  for (auto [jx, jy, jz] : {std::array{1, 1, 1}, std::array{2, 1, 3}}) {
    SpinorField psi(g);
    const RealField mode = dirichlet_mode(g, jx, jy, jz);
    for (std::size_t p = 0; p < g.size(); ++p) psi.down()[p] = mode[p];
    const SpinorField h = apply_H(op, psi);
    const double ev = 0.5 * dirichlet_eigenvalue(g, jx, jy, jz);
    for (std::size_t p = 0; p < 2 * g.size(); ++p) CHECK(std::abs(h.data[p] - ev * psi.data[p]) < 1e-12 * ev);
  }
}

TEST_CASE("uniform Zeeman field shifts the spin channels by -/+ mu B0") {
  const Grid g = Grid::centered(6, 5.0);
  const double b0 = 0.3;
  VectorField b(g);
  for (double& x : b.z.values) x = b0;
  const UField u = assemble_U(b, RealField(g), kBohrMagneton);
  const MeanFieldOperator op = assemble_operator(Mode::noninteracting, u, nullptr, XcFunctional::none());
  const RealField mode = dirichlet_mode(g, 1, 1, 1);
  const double ev = 0.5 * dirichlet_eigenvalue(g, 1, 1, 1);
  SpinorField up(g), down(g);
  for (std::size_t p = 0; p < g.size(); ++p) {
    up.up()[p] = mode[p];
    down.down()[p] = mode[p];
  }
  const SpinorField hu = apply_H(op, up), hd = apply_H(op, down);
  for (std::size_t p = 0; p < 2 * g.size(); ++p) {
    CHECK(std::abs(hu.data[p] - (ev - kBohrMagneton * b0) * up.data[p]) < 1e-12);
    CHECK(std::abs(hd.data[p] - (ev + kBohrMagneton * b0) * down.data[p]) < 1e-12);
  }
}

TEST_CASE("mean-field operator is Hermitian in every mode") {
  const Grid g = Grid::centered(8, 6.0);
  ExternalFields ext;
  ext.nuclei = {{2, {0.3, -0.2, 0.1}}};
  const RealField v = nuclear_potential(ext, g);
  const UField u = assemble_U(random_vector_field(g, 7, 0.4), v, kBohrMagneton);
  const OccupiedSet s = random_occupied_set(g, 3, 11);
  const SpinDensityField r = density_from_orbitals(s);
  const SpinorField a = random_spinor(g, 1), c = random_spinor(g, 2);
  for (Mode m : {Mode::full, Mode::collinear, Mode::unpolarized, Mode::infinity, Mode::noninteracting}) {
    CAPTURE(to_string(m));
    const UField um = m == Mode::infinity ? zero_u(g) : restrict_u(m, u);
    const MeanFieldOperator op = assemble_operator(m, um, &r, XcFunctional::xalpha());
    const SpinorField ha = apply_H(op, a), hc = apply_H(op, c);
    const cplx lhs = inner(a, hc), rhs = std::conj(inner(c, ha));
    CHECK(std::abs(lhs - rhs) < 1e-12 * norm(a) * norm(hc));
  }
}

TEST_CASE("restrict_u keeps what each tier couples") {
  const Grid g = Grid::centered(4, 4.0);
  const RealField v = sample(g, [](const Vec3& x) { return -1.0 / (1.0 + x[0] * x[0]); });
  const UField u = assemble_U(random_vector_field(g, 3), v, kBohrMagneton);
  const UField un = restrict_u(Mode::unpolarized, u);
  const UField co = restrict_u(Mode::collinear, u);
  const UField fu = restrict_u(Mode::full, u);
  for (std::size_t p = 0; p < g.size(); ++p) {
    CHECK(un.uu[p] == doctest::Approx(v[p]).epsilon(1e-15));
    CHECK(un.dd[p] == doctest::Approx(v[p]).epsilon(1e-15));
    CHECK(un.ud_re[p] == 0.0);
    CHECK(co.uu[p] == u.uu[p]);
    CHECK(co.dd[p] == u.dd[p]);
    CHECK(co.ud_re[p] == 0.0);
    CHECK(co.ud_im[p] == 0.0);
    CHECK(fu.ud_im[p] == u.ud_im[p]);
  }
}

TEST_CASE("mode names round-trip and blocks follow the tier") {
  for (Mode m : {Mode::full, Mode::collinear, Mode::unpolarized, Mode::infinity, Mode::noninteracting})
    CHECK(parse_mode(to_string(m)) == m);
  CHECK_THROWS_AS(parse_mode("bogus"), ConfigError);
  CHECK_FALSE(blocks_for(Mode::infinity).external);
  CHECK(blocks_for(Mode::infinity).hartree);
  CHECK(blocks_for(Mode::noninteracting).external);
  CHECK_FALSE(blocks_for(Mode::noninteracting).hartree);
  CHECK_FALSE(blocks_for(Mode::noninteracting).xc);
}

TEST_CASE("operator refuses a density on another grid") {
  const Grid g = Grid::centered(4, 4.0), other = Grid::centered(5, 4.0);
  const SpinDensityField r(other);
  CHECK_THROWS_AS(assemble_operator(Mode::full, zero_u(g), &r, XcFunctional::xalpha()), ConfigError);
}
