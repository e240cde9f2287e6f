#include "lsda/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lsda/error.hpp"
#include "lsda/kernels.hpp"

namespace lsda {

Grid Grid::build(int n, double length, Vec3 origin) {
  if (n < 2) throw ConfigError("grid: n must be >= 2, got " + std::to_string(n));
  if (!(length > 0.0) || !std::isfinite(length))
    throw ConfigError("grid: box length must be positive and finite");
  for (double o : origin)
    if (!std::isfinite(o)) throw ConfigError("grid: origin must be finite");
  Grid g;
  g.n_ = n;
  g.length_ = length;
  g.h_ = length / (n + 1);
  g.origin_ = origin;
  return g;
}

Grid Grid::centered(int n, double length) {
  return build(n, length, {-0.5 * length, -0.5 * length, -0.5 * length});
}

Vec3 Grid::center() const noexcept {
  return {origin_[0] + 0.5 * length_, origin_[1] + 0.5 * length_, origin_[2] + 0.5 * length_};
}

Vec3 Grid::position(std::size_t idx) const noexcept {
  const int k = static_cast<int>(idx % n_);
  const int j = static_cast<int>((idx / n_) % n_);
  const int i = static_cast<int>(idx / (static_cast<std::size_t>(n_) * n_));
  return position(i, j, k);
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw ConfigError(std::string(what) + ": fields live on different grids");
}

double integrate(const RealField& f) {
  const double s = kernels::sum(f.span());
  if (!std::isfinite(s)) throw NumericError("integrate: non-finite field value");
  return f.grid.cell_volume() * s;
}

double inner(const RealField& a, const RealField& b) {
  require_same_grid(a.grid, b.grid, "inner");
  return a.grid.cell_volume() * kernels::dot(a.span(), b.span());
}

cplx inner(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a.grid, b.grid, "inner");
  return a.grid.cell_volume() * kernels::dot(a.span(), b.span());
}

cplx inner(const SpinorField& a, const SpinorField& b) {
  require_same_grid(a.grid, b.grid, "inner");
  return a.grid.cell_volume() * kernels::dot(std::span<const cplx>(a.data), std::span<const cplx>(b.data));
}

double norm(const SpinorField& a) { return std::sqrt(inner(a, a).real()); }

RealField laplacian_apply(const RealField& f) {
  RealField out(f.grid);
  kernels::laplacian(f.span(), out.span(), f.grid.n(), f.grid.spacing());
  return out;
}

ComplexField laplacian_apply(const ComplexField& f) {
  ComplexField out(f.grid);
  kernels::laplacian(f.span(), out.span(), f.grid.n(), f.grid.spacing());
  return out;
}

SpinorField laplacian_apply(const SpinorField& f) {
  SpinorField out(f.grid);
  kernels::laplacian(f.up(), out.up(), f.grid.n(), f.grid.spacing());
  kernels::laplacian(f.down(), out.down(), f.grid.n(), f.grid.spacing());
  return out;
}

RealField gradient_norm_sq(const RealField& f) {
  const Grid& g = f.grid;
  const int n = g.n();
  const double h = g.spacing();
  RealField out(g);
  // derivative along one axis given the three samples around position c
  auto diff = [&](int c, double lo, double mid, double hi) {
    if (c == 0) return (hi - mid) / h;
    if (c == n - 1) return (mid - lo) / h;
    return (hi - lo) / (2.0 * h);
  };
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        auto at = [&](int a, int b, int c) {
          a = std::clamp(a, 0, n - 1);
          b = std::clamp(b, 0, n - 1);
          c = std::clamp(c, 0, n - 1);
          return f[g.index(a, b, c)];
        };
        const double mid = at(i, j, k);
        const double dx = diff(i, at(i - 1, j, k), mid, at(i + 1, j, k));
        const double dy = diff(j, at(i, j - 1, k), mid, at(i, j + 1, k));
        const double dz = diff(k, at(i, j, k - 1), mid, at(i, j, k + 1));
        out[g.index(i, j, k)] = dx * dx + dy * dy + dz * dz;
      }
  return out;
}

double dirichlet_eigenvalue(const Grid& g, int jx, int jy, int jz) {
  const double h2 = g.spacing() * g.spacing();
  auto axis = [&](int j) { return (2.0 - 2.0 * std::cos(j * std::numbers::pi / (g.n() + 1))) / h2; };
  return axis(jx) + axis(jy) + axis(jz);
}

RealField dirichlet_mode(const Grid& g, int jx, int jy, int jz) {
  const int n = g.n();
  RealField out(g);
  auto s = [&](int j, int i) { return std::sin(j * std::numbers::pi * (i + 1) / (n + 1)); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) out[g.index(i, j, k)] = s(jx, i) * s(jy, j) * s(jz, k);
  const double nrm = std::sqrt(inner(out, out));
  for (double& v : out.values) v /= nrm;
  return out;
}

}  // namespace lsda
