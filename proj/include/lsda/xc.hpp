#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lsda/grid.hpp"
#include "lsda/spin_model.hpp"

namespace lsda {

/// (3/4)(3/pi)^{1/3}, the Slater-Dirac exchange constant.
inline constexpr double kSlaterDirac = 0.73855876638202240586;

double g_xalpha(double rho, double c_x);
double g_xalpha_prime(double rho, double c_x);

/// Local density functional E[rho] = integral g(rho). Negative arguments are
/// clamped to zero before evaluation.
struct XcFunctional {
  std::string name = "none";
  std::function<double(double)> g;
  std::function<double(double)> g_prime;
  double c_x = 0.0;

  static XcFunctional none();
  static XcFunctional xalpha(double c_x = kSlaterDirac);

  bool active() const noexcept { return static_cast<bool>(g); }
  double value(double rho) const { return active() ? g(rho < 0.0 ? 0.0 : rho) : 0.0; }
  double derivative(double rho) const { return active() ? g_prime(rho < 0.0 ? 0.0 : rho) : 0.0; }
};

/// Outcome of checking g(0) = 0, g' <= 0, the growth window for |g'| and the
/// small-density exponent alpha < 3/2, on a log-spaced sample of densities.
struct CondGReport {
  bool ok = false;
  double beta_minus = 0.0;
  double beta_plus = 0.0;
  double alpha = 0.0;
  double sup_ratio = 0.0;
  std::vector<std::string> failures;
};

CondGReport validate_cond_g(const XcFunctional& f);

/// 1/2 integral [g(2 rho+) + g(2 rho-)].
double exc_lsda(const RealField& rho_plus, const RealField& rho_minus, const XcFunctional& f);
double exc_lsda(const SpinDensityField& r, const XcFunctional& f);

/// Number of nodes where rho- (or rho) is below zero and gets clamped.
std::size_t count_clamped(const RealField& rho_minus);

/// Pointwise Hermitian 2x2 field, same channel layout as SpinDensityField.
struct MatrixField {
  Grid grid;
  RealField uu;
  RealField dd;
  RealField ud_re;
  RealField ud_im;

  MatrixField() = default;
  explicit MatrixField(const Grid& g) : grid(g), uu(g), dd(g), ud_re(g), ud_im(g) {}
};

/// Functional derivative of exc_lsda with respect to R:
/// g'(2 rho+) (I + P)/2 + g'(2 rho-) (I - P)/2, with the direction matrix P.
/// Where the splitting s is below s_tol_scale * (1 + rho), returns g'(rho) I.
MatrixField vxc_matrix(const SpinDensityField& r, const XcFunctional& f, double s_tol_scale = 1e-10);

/// integral tr[A R] for Hermitian A and R.
double trace_product(const MatrixField& a, const SpinDensityField& r);

}  // namespace lsda
