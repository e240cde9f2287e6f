#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace lsda {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

/// Uniform cubic box with n interior nodes per axis and homogeneous Dirichlet
/// data on the ghost layer just outside. Node (i,j,k) sits at
/// origin + h*(i+1, j+1, k+1) with h = L/(n+1); storage is row-major over (i,j,k).
class Grid {
public:
  Grid() = default;

  /// Throws ConfigError unless n >= 2 and L > 0.
  static Grid build(int n, double length, Vec3 origin);
  /// Box centred on the coordinate origin.
  static Grid centered(int n, double length);

  int n() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double spacing() const noexcept { return h_; }
  double cell_volume() const noexcept { return h_ * h_ * h_; }
  const Vec3& origin() const noexcept { return origin_; }
  Vec3 center() const noexcept;
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
  }

  std::size_t index(int i, int j, int k) const noexcept {
    return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
  }
  double coord(int i) const noexcept { return h_ * (i + 1); }
  Vec3 position(int i, int j, int k) const noexcept {
    return {origin_[0] + coord(i), origin_[1] + coord(j), origin_[2] + coord(k)};
  }
  /// Position of the node stored at flat index idx.
  Vec3 position(std::size_t idx) const noexcept;

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.n_ == b.n_ && a.length_ == b.length_ && a.origin_ == b.origin_;
  }

private:
  int n_ = 0;
  double length_ = 0.0;
  double h_ = 0.0;
  Vec3 origin_{0.0, 0.0, 0.0};
};

/// Throws ConfigError when the two grids differ.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

template <class T>
struct Field {
  Grid grid;
  std::vector<T> values;

  Field() = default;
  explicit Field(const Grid& g, T fill = T{}) : grid(g), values(g.size(), fill) {}

  std::size_t size() const noexcept { return values.size(); }
  T& operator[](std::size_t i) noexcept { return values[i]; }
  const T& operator[](std::size_t i) const noexcept { return values[i]; }
  std::span<T> span() noexcept { return values; }
  std::span<const T> span() const noexcept { return values; }
};

using RealField = Field<double>;
using ComplexField = Field<cplx>;

/// Two-component complex field; the up channel occupies the first grid.size()
/// entries of data, the down channel the rest.
struct SpinorField {
  Grid grid;
  std::vector<cplx> data;

  SpinorField() = default;
  explicit SpinorField(const Grid& g) : grid(g), data(2 * g.size()) {}

  std::size_t nodes() const noexcept { return grid.size(); }
  std::span<cplx> up() noexcept { return {data.data(), nodes()}; }
  std::span<cplx> down() noexcept { return {data.data() + nodes(), nodes()}; }
  std::span<const cplx> up() const noexcept { return {data.data(), nodes()}; }
  std::span<const cplx> down() const noexcept { return {data.data() + nodes(), nodes()}; }
};

/// Sample f at every node.
template <class F>
RealField sample(const Grid& g, F&& f) {
  RealField out(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) out[idx] = f(g.position(idx));
  return out;
}

/// h^3 * sum over nodes. Throws NumericError on non-finite input.
double integrate(const RealField& f);
/// Discrete L2 inner product h^3 * sum conj(a) b.
double inner(const RealField& a, const RealField& b);
cplx inner(const ComplexField& a, const ComplexField& b);
cplx inner(const SpinorField& a, const SpinorField& b);
double norm(const SpinorField& a);

/// Seven-point Dirichlet Laplacian.
RealField laplacian_apply(const RealField& f);
ComplexField laplacian_apply(const ComplexField& f);
/// Channelwise Laplacian of a spinor.
SpinorField laplacian_apply(const SpinorField& f);

/// |grad f|^2 with central differences inside and one-sided differences on the
/// outermost node layer.
RealField gradient_norm_sq(const RealField& f);

/// Closed-form eigenvalue of -Delta_h for the separable sine mode (jx, jy, jz), 1-based.
double dirichlet_eigenvalue(const Grid& g, int jx, int jy, int jz);
/// The corresponding normalized discrete eigenvector.
RealField dirichlet_mode(const Grid& g, int jx, int jy, int jz);

}  // namespace lsda
