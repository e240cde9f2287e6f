#include "lsda/xc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lsda/kernels.hpp"

namespace lsda {

double g_xalpha(double rho, double c_x) {
  if (rho <= 0.0) return 0.0;
  return -c_x * rho * std::cbrt(rho);
}

double g_xalpha_prime(double rho, double c_x) {
  if (rho <= 0.0) return 0.0;
  return -(4.0 / 3.0) * c_x * std::cbrt(rho);
}

XcFunctional XcFunctional::none() { return {}; }

XcFunctional XcFunctional::xalpha(double c_x) {
  XcFunctional f;
  f.name = "xalpha";
  f.c_x = c_x;
  f.g = [c_x](double rho) { return g_xalpha(rho, c_x); };
  f.g_prime = [c_x](double rho) { return g_xalpha_prime(rho, c_x); };
  return f;
}

namespace {

// log-log slope of |f| between a and b; +inf when f vanishes at a.
double log_slope(const std::function<double(double)>& f, double a, double b) {
  const double fa = std::abs(f(a)), fb = std::abs(f(b));
  if (fa == 0.0 && fb == 0.0) return std::numeric_limits<double>::infinity();
  if (fa == 0.0) return std::numeric_limits<double>::infinity();
  if (fb == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(fb / fa) / std::log(b / a);
}

}  // namespace

CondGReport validate_cond_g(const XcFunctional& f) {
  CondGReport rep;
  if (!f.active()) {
    rep.failures.push_back("no functional supplied");
    return rep;
  }
  constexpr double lo = 1e-12, hi = 1e12;
  constexpr int per_decade = 20;
  std::vector<double> samples;
  for (int e = 0; e <= 24 * per_decade; ++e) samples.push_back(lo * std::pow(10.0, e / double(per_decade)));

  const double g0 = f.g(0.0);
  if (g0 != 0.0) rep.failures.push_back("g(0) != 0");
  for (double rho : samples) {
    const double gv = f.g(rho), dg = f.g_prime(rho);
    if (!std::isfinite(gv) || !std::isfinite(dg)) {
      rep.failures.push_back("non-finite value");
      break;
    }
    if (dg > 0.0) {
      rep.failures.push_back("g' > 0 somewhere");
      break;
    }
  }

  constexpr double margin = 1e-3;
  const double p0 = log_slope(f.g_prime, lo, 1e2 * lo);
  const double pinf = log_slope(f.g_prime, 1e-2 * hi, hi);
  if (!(p0 > margin)) rep.failures.push_back("|g'| does not vanish like rho^beta- with beta- > 0 at small density");
  if (!(pinf < 2.0 / 3.0 - margin)) rep.failures.push_back("|g'| grows at least like rho^{2/3} at large density");
  rep.beta_minus = std::clamp(p0, margin, 2.0 / 3.0 - margin);
  rep.beta_plus = std::max(rep.beta_minus, std::clamp(pinf, margin, 2.0 / 3.0 - margin));
  for (double rho : samples) {
    const double ratio = std::abs(f.g_prime(rho)) / (std::pow(rho, rep.beta_minus) + std::pow(rho, rep.beta_plus));
    rep.sup_ratio = std::max(rep.sup_ratio, ratio);
  }
  if (!std::isfinite(rep.sup_ratio)) rep.failures.push_back("|g'|/(rho^b- + rho^b+) unbounded");

  const double q0 = log_slope(f.g, lo, 1e2 * lo);
  if (!(f.g(lo) < 0.0)) rep.failures.push_back("g is not negative near zero");
  if (!(q0 < 1.5 - margin)) rep.failures.push_back("g vanishes faster than rho^{3/2} at small density");
  rep.alpha = std::max(1.0, q0);

  rep.ok = rep.failures.empty();
  return rep;
}

double exc_lsda(const RealField& rho_plus, const RealField& rho_minus, const XcFunctional& f) {
  require_same_grid(rho_plus.grid, rho_minus.grid, "exc_lsda");
  if (!f.active()) return 0.0;
  std::vector<double> e(rho_plus.size());
  for (std::size_t p = 0; p < e.size(); ++p) e[p] = f.value(2.0 * rho_plus[p]) + f.value(2.0 * rho_minus[p]);
  return 0.5 * rho_plus.grid.cell_volume() * kernels::sum(e);
}

double exc_lsda(const SpinDensityField& r, const XcFunctional& f) {
  const auto pm = eigenvalues_pm(r);
  return exc_lsda(pm.plus, pm.minus, f);
}

std::size_t count_clamped(const RealField& rho_minus) {
  return static_cast<std::size_t>(std::count_if(rho_minus.values.begin(), rho_minus.values.end(),
                                                [](double v) { return v < 0.0; }));
}

MatrixField vxc_matrix(const SpinDensityField& r, const XcFunctional& f, double s_tol_scale) {
  MatrixField v(r.grid);
  if (!f.active()) return v;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(r.grid.size()); ++p) {
    const double uu = r.uu[p], dd = r.dd[p], xr = r.ud_re[p], xi = r.ud_im[p];
    const double rho = uu + dd;
    const double diff = uu - dd;
    const double s = std::sqrt(diff * diff + 4.0 * (xr * xr + xi * xi));
    if (s < s_tol_scale * (1.0 + std::abs(rho))) {
      const double d = f.derivative(rho);
      v.uu[p] = d;
      v.dd[p] = d;
      v.ud_re[p] = 0.0;
      v.ud_im[p] = 0.0;
      continue;
    }
    const double dp = f.derivative(rho + s);  // g'(2 rho+)
    const double dm = f.derivative(rho - s);  // g'(2 rho-)
    const double avg = 0.5 * (dp + dm);
    const double half_gap = 0.5 * (dp - dm) / s;
    // P = [[diff, 2 ud], [2 conj(ud), -diff]] / s
    v.uu[p] = avg + half_gap * diff;
    v.dd[p] = avg - half_gap * diff;
    v.ud_re[p] = half_gap * 2.0 * xr;
    v.ud_im[p] = half_gap * 2.0 * xi;
  }
  return v;
}

double trace_product(const MatrixField& a, const SpinDensityField& r) {
  require_same_grid(a.grid, r.grid, "trace_product");
  std::vector<double> t(r.grid.size());
  for (std::size_t p = 0; p < t.size(); ++p)
    t[p] = a.uu[p] * r.uu[p] + a.dd[p] * r.dd[p] + 2.0 * (a.ud_re[p] * r.ud_re[p] + a.ud_im[p] * r.ud_im[p]);
  return r.grid.cell_volume() * kernels::sum(t);
}

}  // namespace lsda
