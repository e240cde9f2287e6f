#include "lsda/kernels.hpp"

#include <algorithm>
#include <type_traits>
#include <vector>

namespace lsda::kernels {

namespace {

template <class T>
void laplacian_impl(std::span<const T> in, std::span<T> out, int n, double h) {
  const double inv_h2 = 1.0 / (h * h);
  const std::ptrdiff_t sn = n;
  const std::ptrdiff_t plane = sn * sn;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::ptrdiff_t row = (i * sn + j) * sn;
      const T* c = in.data() + row;
      T* o = out.data() + row;
      const T* xm = i > 0 ? c - plane : nullptr;
      const T* xp = i + 1 < n ? c + plane : nullptr;
      const T* ym = j > 0 ? c - sn : nullptr;
      const T* yp = j + 1 < n ? c + sn : nullptr;
      for (int k = 0; k < n; ++k) {
        T acc = -6.0 * c[k];
        if (k > 0) acc += c[k - 1];
        if (k + 1 < n) acc += c[k + 1];
        if (ym) acc += ym[k];
        if (yp) acc += yp[k];
        if (xm) acc += xm[k];
        if (xp) acc += xp[k];
        o[k] = acc * inv_h2;
      }
    }
  }
}

template <class T, class Op>
T blocked_reduce(std::size_t count, Op&& op) {
  const std::size_t blocks = (count + kReductionBlock - 1) / kReductionBlock;
  std::vector<T> partial(blocks, T{});
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(count, lo + kReductionBlock);
    T acc{};
    for (std::size_t i = lo; i < hi; ++i) acc += op(i);
    partial[b] = acc;
  }
  T total{};
  for (const T& p : partial) total += p;
  return total;
}

inline cplx local_ud(const LocalMatrixView& m, std::size_t p) {
  return {m.ud_re[p], m.ud_im[p]};
}

template <class T>
void apply_h_impl(std::span<const T> in, std::span<T> out, int n, double h, const LocalMatrixView& m) {
  const std::size_t nodes = static_cast<std::size_t>(n) * n * n;
  const bool spinor = in.size() == 2 * nodes;
  laplacian_impl<T>(in.first(nodes), out.first(nodes), n, h);
  if (spinor) laplacian_impl<T>(in.subspan(nodes), out.subspan(nodes), n, h);
  if (!spinor) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(nodes); ++p)
      out[p] = -0.5 * out[p] + m.uu[p] * in[p];
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(nodes); ++p) {
    const T a = in[p];
    const T b = in[p + nodes];
    if constexpr (std::is_same_v<T, double>) {
      // real arithmetic is only used when the off-diagonal is real
      out[p] = -0.5 * out[p] + m.uu[p] * a + m.ud_re[p] * b;
      out[p + nodes] = -0.5 * out[p + nodes] + m.ud_re[p] * a + m.dd[p] * b;
    } else {
      const cplx ud = local_ud(m, p);
      out[p] = -0.5 * out[p] + m.uu[p] * a + ud * b;
      out[p + nodes] = -0.5 * out[p + nodes] + std::conj(ud) * a + m.dd[p] * b;
    }
  }
}

}  // namespace

void laplacian(std::span<const double> in, std::span<double> out, int n, double h) {
  laplacian_impl<double>(in, out, n, h);
}
void laplacian(std::span<const cplx> in, std::span<cplx> out, int n, double h) {
  laplacian_impl<cplx>(in, out, n, h);
}

double sum(std::span<const double> a) {
  return blocked_reduce<double>(a.size(), [&](std::size_t i) { return a[i]; });
}

double dot(std::span<const double> a, std::span<const double> b) {
  return blocked_reduce<double>(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  return blocked_reduce<cplx>(a.size(), [&](std::size_t i) { return std::conj(a[i]) * b[i]; });
}

void apply_hamiltonian(std::span<const double> in, std::span<double> out, int n, double h,
                       const LocalMatrixView& m) {
  apply_h_impl<double>(in, out, n, h, m);
}
void apply_hamiltonian(std::span<const cplx> in, std::span<cplx> out, int n, double h,
                       const LocalMatrixView& m) {
  apply_h_impl<cplx>(in, out, n, h, m);
}

void accumulate_density(std::span<const cplx> up, std::span<const cplx> down, double occ,
                        const DensityView& r) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(up.size()); ++p) {
    const cplx a = up[p];
    const cplx b = down[p];
    const cplx ab = a * std::conj(b);
    r.uu[p] += occ * std::norm(a);
    r.dd[p] += occ * std::norm(b);
    r.ud_re[p] += occ * ab.real();
    r.ud_im[p] += occ * ab.imag();
  }
}

namespace reference {

namespace {

template <class T>
void laplacian_ref(std::span<const T> in, std::span<T> out, int n, double h) {
  auto at = [&](int i, int j, int k) -> T {
    if (i < 0 || j < 0 || k < 0 || i >= n || j >= n || k >= n) return T{};
    return in[(static_cast<std::size_t>(i) * n + j) * n + k];
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const T s = at(i - 1, j, k) + at(i + 1, j, k) + at(i, j - 1, k) + at(i, j + 1, k) +
                    at(i, j, k - 1) + at(i, j, k + 1) - 6.0 * at(i, j, k);
        out[(static_cast<std::size_t>(i) * n + j) * n + k] = s / (h * h);
      }
}

}  // namespace

void laplacian(std::span<const double> in, std::span<double> out, int n, double h) {
  laplacian_ref<double>(in, out, n, h);
}
void laplacian(std::span<const cplx> in, std::span<cplx> out, int n, double h) {
  laplacian_ref<cplx>(in, out, n, h);
}

double sum(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

void apply_hamiltonian(std::span<const cplx> in, std::span<cplx> out, int n, double h,
                       const LocalMatrixView& m) {
  const std::size_t nodes = static_cast<std::size_t>(n) * n * n;
  std::vector<cplx> lap(in.size());
  laplacian(in.first(nodes), std::span<cplx>(lap).first(nodes), n, h);
  if (in.size() == nodes) {
    for (std::size_t p = 0; p < nodes; ++p) out[p] = -0.5 * lap[p] + m.uu[p] * in[p];
    return;
  }
  laplacian(in.subspan(nodes), std::span<cplx>(lap).subspan(nodes), n, h);
  for (std::size_t p = 0; p < nodes; ++p) {
    const cplx ud(m.ud_re[p], m.ud_im[p]);
    out[p] = -0.5 * lap[p] + m.uu[p] * in[p] + ud * in[p + nodes];
    out[p + nodes] = -0.5 * lap[p + nodes] + std::conj(ud) * in[p] + m.dd[p] * in[p + nodes];
  }
}

void accumulate_density(std::span<const cplx> up, std::span<const cplx> down, double occ,
                        const DensityView& r) {
  for (std::size_t p = 0; p < up.size(); ++p) {
    r.uu[p] += occ * std::norm(up[p]);
    r.dd[p] += occ * std::norm(down[p]);
    const cplx ab = up[p] * std::conj(down[p]);
    r.ud_re[p] += occ * ab.real();
    r.ud_im[p] += occ * ab.imag();
  }
}

}  // namespace reference

}  // namespace lsda::kernels
