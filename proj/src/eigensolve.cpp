#include "lsda/eigensolve.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lsda/error.hpp"

namespace lsda {

namespace {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
using VecD = Eigen::VectorXd;
using Index = Eigen::Index;

template <class T>
T real_or_complex(double re, double im) {
  if constexpr (std::is_same_v<T, double>)
    return re;
  else
    return T(re, im);
}

template <class T>
void fill_random(Mat<T>& m, Index from_col, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  for (Index c = from_col; c < m.cols(); ++c)
    for (Index r = 0; r < m.rows(); ++r) {
      const double re = dist(rng);
      const double im = std::is_same_v<T, double> ? 0.0 : dist(rng);
      m(r, c) = real_or_complex<T>(re, im);
    }
}

// Orthonormalizes the columns of v (applying the same transform to hv) by
// eigendecomposition of the Gram matrix; nearly dependent directions are dropped.
template <class T>
void svqb(Mat<T>& v, Mat<T>* hv) {
  if (v.cols() == 0) return;
  VecD scale(v.cols());
  for (Index c = 0; c < v.cols(); ++c) {
    const double nrm = v.col(c).norm();
    scale(c) = nrm > 0.0 ? 1.0 / nrm : 0.0;
  }
  Mat<T> g = scale.asDiagonal() * (v.adjoint() * v) * scale.asDiagonal();
  g = (0.5 * (g + g.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Mat<T>> es(g);
  const VecD& d = es.eigenvalues();
  const double dmax = std::max(d.maxCoeff(), 0.0);
  Index keep = 0;
  for (Index i = 0; i < d.size(); ++i)
    if (d(i) > 1e-13 * dmax && d(i) > 0.0) ++keep;
  if (keep == 0) {
    v.resize(v.rows(), 0);
    if (hv) hv->resize(hv->rows(), 0);
    return;
  }
  const VecD inv_sqrt = d.tail(keep).cwiseSqrt().cwiseInverse();
  const Mat<T> q = scale.asDiagonal() * es.eigenvectors().rightCols(keep) * inv_sqrt.asDiagonal();
  v = (v * q).eval();
  if (hv) *hv = (*hv * q).eval();
}

// b -= a (a^H b), twice.
template <class T>
void project_out(const Mat<T>& a, Mat<T>& b, const Mat<T>* ha = nullptr, Mat<T>* hb = nullptr) {
  if (a.cols() == 0 || b.cols() == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    const Mat<T> c = a.adjoint() * b;
    b.noalias() -= a * c;
    if (ha && hb) hb->noalias() -= *ha * c;
  }
}

template <class T>
struct BlockResult {
  VecD values;
  Mat<T> vectors;
  VecD residuals;
  int iterations = 0;
};

template <class T, class Apply>
BlockResult<T> block_solve(Index dim, int k, int m, Apply&& apply, const VecD& precond, Mat<T> x, double tol,
                           int max_iter) {
  Mat<T> hx(dim, x.cols());
  svqb<T>(x, nullptr);
  if (x.cols() < m) throw NumericError("eigensolver: rank-deficient starting block");
  apply(x, hx);
  {
    Mat<T> a = x.adjoint() * hx;
    a = (0.5 * (a + a.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Mat<T>> es(a);
    x = (x * es.eigenvectors()).eval();
    hx = (hx * es.eigenvectors()).eval();
  }
  VecD lambda(m);
  for (Index j = 0; j < m; ++j) lambda(j) = std::real(x.col(j).dot(hx.col(j)));

  Mat<T> p, hp;
  VecD res(m);
  for (int it = 0;; ++it) {
    Mat<T> r = hx - x * lambda.asDiagonal();
    for (Index j = 0; j < m; ++j) res(j) = r.col(j).norm();
    bool done = true;
    for (int j = 0; j < k; ++j)
      if (res(j) > tol * (1.0 + std::abs(lambda(j)))) done = false;
    if (done) return {lambda, x, res, it};
    if (it >= max_iter) {
      std::vector<double> worst(res.data(), res.data() + k);
      throw SolverError("eigensolver: no convergence after " + std::to_string(max_iter) + " iterations", worst);
    }

    std::vector<Index> active;
    for (Index j = 0; j < m; ++j)
      if (res(j) > 0.1 * tol * (1.0 + std::abs(lambda(j)))) active.push_back(j);

    Mat<T> w(dim, static_cast<Index>(active.size()));
    for (Index c = 0; c < w.cols(); ++c) w.col(c) = r.col(active[c]).cwiseQuotient(precond.cast<T>());
    project_out<T>(x, w);
    svqb<T>(w, nullptr);
    svqb<T>(w, nullptr);
    Mat<T> hw(dim, w.cols());
    apply(w, hw);

    Mat<T> pa, hpa;
    if (p.cols() > 0) {
      pa.resize(dim, static_cast<Index>(active.size()));
      hpa.resize(dim, pa.cols());
      for (Index c = 0; c < pa.cols(); ++c) {
        pa.col(c) = p.col(active[c]);
        hpa.col(c) = hp.col(active[c]);
      }
      project_out<T>(x, pa, &hx, &hpa);
      project_out<T>(w, pa, &hw, &hpa);
      svqb<T>(pa, &hpa);
      svqb<T>(pa, &hpa);
    }

    const Index ns = m + w.cols() + pa.cols();
    Mat<T> s(dim, ns), hs(dim, ns);
    s << x, w, pa;
    hs << hx, hw, hpa;
    Mat<T> a = s.adjoint() * hs;
    a = (0.5 * (a + a.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Mat<T>> es(a);
    const Mat<T> y = es.eigenvectors().leftCols(m);
    lambda = es.eigenvalues().head(m);

    const Index extra = ns - m;
    if (extra > 0) {
      p = s.rightCols(extra) * y.bottomRows(extra);
      hp = hs.rightCols(extra) * y.bottomRows(extra);
    }
    x = s * y;
    hx = hs * y;
    if (it % 25 == 24) {
      // rounding drift in the orthonormality of x
      Mat<T> g = x.adjoint() * x;
      Eigen::LLT<Mat<T>> llt(g);
      if (llt.info() == Eigen::Success) {
        const Mat<T> linv = llt.matrixL().solve(Mat<T>::Identity(m, m)).adjoint();
        x = (x * linv).eval();
        hx = (hx * linv).eval();
      }
    }
  }
}

template <class T>
Mat<T> to_block(const std::vector<SpinorField>& orbitals, int channel, Index dim, Index cols, double scale) {
  Mat<T> out(dim, 0);
  std::vector<Index> picked;
  std::vector<Eigen::Matrix<T, Eigen::Dynamic, 1>> columns;
  for (const auto& phi : orbitals) {
    if (static_cast<Index>(columns.size()) >= cols) break;
    Eigen::Matrix<T, Eigen::Dynamic, 1> v(dim);
    std::span<const cplx> src;
    if (channel < 0)
      src = std::span<const cplx>(phi.data);
    else
      src = channel == 0 ? phi.up() : phi.down();
    double weight = 0.0;
    for (Index i = 0; i < dim; ++i) {
      if constexpr (std::is_same_v<T, double>)
        v(i) = src[i].real() * scale;
      else
        v(i) = src[i] * scale;
      weight += std::norm(v(i));
    }
    if (weight > 0.25) columns.push_back(std::move(v));
  }
  out.resize(dim, static_cast<Index>(columns.size()));
  for (Index c = 0; c < out.cols(); ++c) out.col(c) = columns[c];
  return out;
}

struct ChannelPairs {
  std::vector<double> values;
  std::vector<std::vector<cplx>> vectors;  // unit Euclidean norm
  std::vector<double> residuals;
  int iterations = 0;
};

template <class T, class ApplyOne>
ChannelPairs solve_problem(Index dim, int k, const EigenOptions& opt, const VecD& precond, ApplyOne&& apply_one,
                           const std::vector<SpinorField>* initial, int channel, double h) {
  const int guard = opt.guard >= 0 ? opt.guard : std::max(4, k / 4);
  const int m = std::min<Index>(k + guard, dim);
  if (k > m) throw ConfigError("eigensolver: requested more eigenpairs than the problem dimension");
  std::mt19937_64 rng(opt.seed);
  Mat<T> x(dim, m);
  Index seeded = 0;
  if (initial && !initial->empty()) {
    Mat<T> init = to_block<T>(*initial, channel, dim, m, std::pow(h, 1.5));
    seeded = init.cols();
    x.leftCols(seeded) = init;
  }
  fill_random<T>(x, seeded, rng);
  auto apply = [&](const Mat<T>& in, Mat<T>& out) {
    for (Index c = 0; c < in.cols(); ++c)
      apply_one(std::span<const T>(in.col(c).data(), dim), std::span<T>(out.col(c).data(), dim));
  };
  auto res = block_solve<T>(dim, k, m, apply, precond, std::move(x), opt.tol, opt.max_iter);
  ChannelPairs out;
  out.iterations = res.iterations;
  for (int j = 0; j < k; ++j) {
    out.values.push_back(res.values(j));
    out.residuals.push_back(res.residuals(j));
    std::vector<cplx> v(dim);
    for (Index i = 0; i < dim; ++i) v[i] = cplx(res.vectors(i, j));
    out.vectors.push_back(std::move(v));
  }
  return out;
}

VecD make_precond(const MeanFieldOperator& op, int channel) {
  const std::size_t nodes = op.nodes();
  const double kin = 3.0 / (op.grid.spacing() * op.grid.spacing());
  auto diag_of = [&](int c, std::size_t p) { return c == 0 ? op.local.uu[p] : op.local.dd[p]; };
  double vmin = 0.0;
  for (std::size_t p = 0; p < nodes; ++p) vmin = std::min({vmin, op.local.uu[p], op.local.dd[p]});
  const Index dim = channel < 0 ? 2 * nodes : nodes;
  VecD d(dim);
  for (Index i = 0; i < dim; ++i) {
    const int c = channel < 0 ? static_cast<int>(i / nodes) : channel;
    d(i) = kin + diag_of(c, i % nodes) - vmin;
  }
  return d;
}

template <class T>
ChannelPairs solve_channel(const MeanFieldOperator& op, int channel, int k, const EigenOptions& opt,
                           const std::vector<SpinorField>* initial) {
  const Index dim = channel < 0 ? 2 * op.nodes() : op.nodes();
  const VecD precond = make_precond(op, channel);
  auto apply_one = [&](std::span<const T> in, std::span<T> out) {
    if (channel < 0)
      op.apply(in, out);
    else
      op.apply_channel(channel, in, out);
  };
  return solve_problem<T>(dim, k, opt, precond, apply_one, initial, channel, op.grid.spacing());
}

SpinorField spinor_from(const Grid& g, const std::vector<cplx>& v, int channel) {
  SpinorField s(g);
  const double scale = std::pow(g.spacing(), -1.5);
  if (channel < 0) {
    for (std::size_t i = 0; i < v.size(); ++i) s.data[i] = v[i] * scale;
  } else {
    auto dst = channel == 0 ? s.up() : s.down();
    for (std::size_t i = 0; i < v.size(); ++i) dst[i] = v[i] * scale;
  }
  return s;
}

}  // namespace

EigenSolution lowest_eigenpairs(const MeanFieldOperator& op, int k, const EigenOptions& opt,
                                const std::vector<SpinorField>* initial) {
  if (k < 1) throw ConfigError("eigensolver: k must be >= 1");
  if (!(opt.tol > 0.0)) throw ConfigError("eigensolver: tol must be positive");
  const bool real = op.is_real();
  const Grid& g = op.grid;
  EigenSolution sol;

  struct Tagged {
    double value;
    double residual;
    int channel;
    const std::vector<cplx>* vec;
  };
  std::vector<Tagged> merged;
  std::vector<ChannelPairs> parts;

  auto run = [&](int channel, int count) {
    if (static_cast<std::size_t>(count) > (channel < 0 ? 2 : 1) * op.nodes() / 2)
      throw ConfigError("eigensolver: k too large for this grid");
    parts.push_back(real ? solve_channel<double>(op, channel, count, opt, initial)
                         : solve_channel<cplx>(op, channel, count, opt, initial));
    sol.iterations = std::max(sol.iterations, parts.back().iterations);
  };

  switch (op.mode) {
    case Mode::collinear:
      run(0, k);
      run(1, k);
      break;
    case Mode::unpolarized:
      run(0, (k + 1) / 2);
      break;
    default:
      run(-1, k);
  }

  if (op.mode == Mode::unpolarized) {
    const auto& part = parts.front();
    for (std::size_t j = 0; j < part.values.size(); ++j) {
      for (int c = 0; c < 2; ++c) {
        sol.eigenvalues.push_back(part.values[j]);
        sol.residual_norms.push_back(part.residuals[j]);
        sol.eigenvectors.push_back(spinor_from(g, part.vectors[j], c));
      }
    }
    return sol;
  }
  for (std::size_t pi = 0; pi < parts.size(); ++pi) {
    const int channel = op.mode == Mode::collinear ? static_cast<int>(pi) : -1;
    for (std::size_t j = 0; j < parts[pi].values.size(); ++j)
      merged.push_back({parts[pi].values[j], parts[pi].residuals[j], channel, &parts[pi].vectors[j]});
  }
  std::stable_sort(merged.begin(), merged.end(), [](const Tagged& a, const Tagged& b) { return a.value < b.value; });
  // each channel holds its own k lowest, so only the k lowest of the union are complete
  if (merged.size() > static_cast<std::size_t>(k)) merged.resize(k);
  for (const auto& t : merged) {
    sol.eigenvalues.push_back(t.value);
    sol.residual_norms.push_back(t.residual);
    sol.eigenvectors.push_back(spinor_from(g, *t.vec, t.channel));
  }
  return sol;
}

EigenSolution dense_oracle(const MeanFieldOperator& op) {
  const std::size_t dim = 2 * op.nodes();
  if (dim > kDenseOracleMaxDimension)
    throw ConfigError("dense_oracle: dimension " + std::to_string(dim) + " exceeds " +
                      std::to_string(kDenseOracleMaxDimension));
  const Index n = static_cast<Index>(dim);
  Mat<cplx> hmat(n, n);
  std::vector<cplx> e(dim), col(dim);
  for (Index j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), cplx(0.0));
    e[j] = 1.0;
    op.apply(std::span<const cplx>(e), std::span<cplx>(col));
    for (Index i = 0; i < n; ++i) hmat(i, j) = col[i];
  }
  const double scale = hmat.cwiseAbs().maxCoeff();
  const double asym = (hmat - hmat.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(scale, 1.0)) throw NumericError("dense_oracle: assembled operator is not Hermitian");
  hmat = (0.5 * (hmat + hmat.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Mat<cplx>> es(hmat);
  EigenSolution sol;
  const double inv = std::pow(op.grid.spacing(), -1.5);
  for (Index j = 0; j < n; ++j) {
    sol.eigenvalues.push_back(es.eigenvalues()(j));
    SpinorField s(op.grid);
    for (Index i = 0; i < n; ++i) s.data[i] = es.eigenvectors()(i, j) * inv;
    sol.eigenvectors.push_back(std::move(s));
    const Eigen::VectorXcd r = hmat * es.eigenvectors().col(j) - es.eigenvalues()(j) * es.eigenvectors().col(j);
    sol.residual_norms.push_back(r.norm());
  }
  return sol;
}

}  // namespace lsda
