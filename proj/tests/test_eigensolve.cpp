#include <doctest.h>

#include <cmath>

#include "lsda/eigensolve.hpp"
#include "lsda/error.hpp"
#include "lsda/verify.hpp"

using namespace lsda;

namespace {

UField hydrogen_u(const Grid& g, const VectorField& b) {
  ExternalFields ext;
  ext.nuclei = {{1, {0.0, 0.0, 0.0}}};
  ext.softening = 0.5;
  return assemble_U(b, nuclear_potential(ext, g), kBohrMagneton);
}

}  // namespace

TEST_CASE("pure kinetic lowest level is the discrete Dirichlet ground state, doubled for spin") {
  const Grid g = Grid::centered(9, 6.0);
  const UField u = assemble_U(VectorField(g), RealField(g), kBohrMagneton);
  const MeanFieldOperator op = assemble_operator(Mode::noninteracting, u, nullptr, XcFunctional::none());
  const EigenSolution sol = lowest_eigenpairs(op, 4, {1e-9, 3000, 5, -1});
  const double h = g.spacing();
  const double ground = 1.5 * (2.0 - 2.0 * std::cos(M_PI / (g.n() + 1))) / (h * h);
  CHECK(sol.eigenvalues[0] == doctest::Approx(ground).epsilon(1e-10));
  CHECK(sol.eigenvalues[1] == doctest::Approx(ground).epsilon(1e-10));
  CHECK(sol.eigenvalues[2] == doctest::Approx(0.5 * dirichlet_eigenvalue(g, 2, 1, 1)).epsilon(1e-10));
}

TEST_CASE("iterative and dense spectra agree on small grids") {
  for (int n : {6, 7}) {
    const Grid g = Grid::centered(n, 6.0);
    const UField u = hydrogen_u(g, random_vector_field(g, 9, 0.3));
    const OccupiedSet s = random_occupied_set(g, 2, 4);
    const SpinDensityField r = density_from_orbitals(s);
    for (Mode m : {Mode::full, Mode::collinear, Mode::unpolarized}) {
      CAPTURE(n);
      CAPTURE(to_string(m));
      const MeanFieldOperator op = assemble_operator(m, restrict_u(m, u), &r, XcFunctional::xalpha());
      const EigenSolution dense = dense_oracle(op);
      const EigenSolution it = lowest_eigenpairs(op, 6, {1e-10, 5000, 1, -1});
      for (std::size_t i = 0; i < it.eigenvalues.size(); ++i)
        CHECK(std::abs(it.eigenvalues[i] - dense.eigenvalues[i]) < 1e-8);
      for (std::size_t i = 0; i < it.eigenvalues.size(); ++i) {
        CHECK(it.residual_norms[i] <= 1e-10 * (1.0 + std::abs(it.eigenvalues[i])));
        const SpinorField hv = apply_H(op, it.eigenvectors[i]);
        double res = 0.0;
        for (std::size_t p = 0; p < hv.data.size(); ++p)
          res += std::norm(hv.data[p] - it.eigenvalues[i] * it.eigenvectors[i].data[p]);
        CHECK(std::sqrt(res * g.cell_volume()) <= 2e-10 * (1.0 + std::abs(it.eigenvalues[i])));
        for (std::size_t j = 0; j <= i; ++j)
          CHECK(std::abs(inner(it.eigenvectors[j], it.eigenvectors[i]) - (i == j ? 1.0 : 0.0)) < 1e-10);
      }
    }
  }
}

TEST_CASE("spin doubling without a field and Zeeman splitting with a uniform one") {
  const Grid g = Grid::centered(8, 7.0);
  const EigenOptions opt{1e-10, 5000, 3, -1};
  const MeanFieldOperator plain =
      assemble_operator(Mode::noninteracting, hydrogen_u(g, VectorField(g)), nullptr, XcFunctional::none());
  const EigenSolution a = lowest_eigenpairs(plain, 6, opt);
  for (std::size_t i = 0; i + 1 < a.eigenvalues.size(); i += 2)
    CHECK(std::abs(a.eigenvalues[i] - a.eigenvalues[i + 1]) < 1e-8);

  const double b0 = 0.05;
  VectorField b(g);
  for (double& x : b.z.values) x = b0;
  const MeanFieldOperator zee = assemble_operator(Mode::noninteracting, hydrogen_u(g, b), nullptr, XcFunctional::none());
  const EigenSolution z = lowest_eigenpairs(zee, 2, opt);
  CHECK(z.eigenvalues[0] == doctest::Approx(a.eigenvalues[0] - kBohrMagneton * b0).epsilon(1e-9));
  CHECK(z.eigenvalues[1] - z.eigenvalues[0] == doctest::Approx(2.0 * kBohrMagneton * b0).epsilon(1e-7));
}

TEST_CASE("eigensolver is deterministic for a fixed seed") {
  const Grid g = Grid::centered(8, 6.0);
  const MeanFieldOperator op =
      assemble_operator(Mode::noninteracting, hydrogen_u(g, random_vector_field(g, 2, 0.2)), nullptr,
                        XcFunctional::none());
  const EigenSolution a = lowest_eigenpairs(op, 3, {1e-9, 3000, 77, -1});
  const EigenSolution b = lowest_eigenpairs(op, 3, {1e-9, 3000, 77, -1});
  CHECK(a.eigenvalues == b.eigenvalues);
  CHECK(a.eigenvectors[0].data == b.eigenvectors[0].data);
}

TEST_CASE("zero operator has a zero spectrum") {
  const Grid g = Grid::centered(3, 1e9);  // kinetic term negligible against rounding
  const UField u = assemble_U(VectorField(g), RealField(g), kBohrMagneton);
  const EigenSolution d = dense_oracle(assemble_operator(Mode::noninteracting, u, nullptr, XcFunctional::none()));
  for (double e : d.eigenvalues) CHECK(std::abs(e) < 1e-15);
}

TEST_CASE("dense oracle refuses large grids and non-convergence is reported") {
  const Grid big = Grid::centered(13, 6.0);  // 2 * 13^3 > 4096
  const UField u = assemble_U(VectorField(big), RealField(big), kBohrMagneton);
  const MeanFieldOperator op = assemble_operator(Mode::noninteracting, u, nullptr, XcFunctional::none());
  CHECK_THROWS_AS(dense_oracle(op), ConfigError);
  try {
    lowest_eigenpairs(op, 4, {1e-14, 2, 1, -1});
    FAIL("expected a solver error");
  } catch (const SolverError& e) {
    CHECK(e.residuals().size() == 4);
  }
}
