#include "splitma/krylov.hpp"

#include <cmath>
#include <limits>
#include <complex>
#include <numbers>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace splitma {

ScalarField SplitOperator::apply(const ScalarField& u) const {
  if (divergence) return second_plus(coeff_plus * u) + second_minus(coeff_minus * u);
  return coeff_plus * second_plus(u) + coeff_minus * second_minus(u);
}

namespace {

using cd = std::complex<double>;
using SpMat = Eigen::SparseMatrix<cd>;
using Solver = Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>;

// 4th-order stencil with even reflection, as in Grid::apply_axis.
std::vector<Eigen::Triplet<cd>> stencil(std::size_t n, double h, int order, cd scale) {
  static constexpr double c1[5] = {1.0, -8.0, 0.0, 8.0, -1.0};
  static constexpr double c2[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};
  const double denom = order == 1 ? 12.0 * h : 12.0 * h * h;
  const long last = long(n) - 1;
  std::vector<Eigen::Triplet<cd>> t;
  for (long k = 0; k <= last; ++k) {
    for (int o = -2; o <= 2; ++o) {
      long j = k + o;
      if (j < 0) j = -j;
      if (j > last) j = 2 * last - j;
      const double c = (order == 1 ? c1 : c2)[o + 2];
      if (c != 0.0) t.emplace_back(int(k), int(j), scale * c / denom);
    }
  }
  return t;
}

SpMat from_triplets(std::size_t n, const std::vector<Eigen::Triplet<cd>>& t) {
  SpMat m{static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)};
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SpMat diag(const std::vector<double>& d) {
  SpMat m{static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size())};
  std::vector<Eigen::Triplet<cd>> t;
  for (std::size_t i = 0; i < d.size(); ++i) t.emplace_back(int(i), int(i), d[i]);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

class ModalPreconditioner {
 public:
  ModalPreconditioner(const SplitOperator& op, const ScalarField& border) : g_(op.coeff_plus.grid()) {
    const Grid& g = *g_;
    for (std::size_t a = 0; a < g.rank(); ++a) {
      if (g.periodic(a)) {
        periodic_.push_back(a);
      } else {
        trunc_ = int(a);
        nt_ = g.extent(a);
      }
    }
    for (std::size_t a : periodic_) {
      const std::size_t n = g.extent(a);
      Eigen::MatrixXcd f(n, n), b(n, n);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          const double th = 2.0 * std::numbers::pi * double(j * k % n) / double(n);
          f(j, k) = cd(std::cos(th), -std::sin(th));
          b(j, k) = cd(std::cos(th), std::sin(th)) / double(n);
        }
      fwd_.push_back(std::move(f));
      inv_.push_back(std::move(b));
    }
    np_ = g.size() / nt_;
    tstride_ = trunc_ >= 0 ? g.stride(std::size_t(trunc_)) : 1;

    std::vector<double> wt(nt_, 1.0);
    if (trunc_ >= 0) {
      auto w = g.weights(std::size_t(trunc_));
      double s = 0.0;
      for (double v : w) s += v;
      for (std::size_t i = 0; i < nt_; ++i) wt[i] = w[i] / s;
    }

    std::vector<cd> bhat(border.values().begin(), border.values().end());
    transform(bhat, true);
    bhat_ = std::move(bhat);

    // coefficients averaged over the periodic axes (full average on the torus)
    std::vector<double> cp(nt_, 0.0), cm(nt_, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::size_t t = trunc_ >= 0 ? (i / tstride_) % nt_ : 0;
      cp[t] += op.coeff_plus[i] / double(np_);
      cm[t] += op.coeff_minus[i] / double(np_);
    }

    positions_.resize(np_);
    {
      std::size_t p = 0;
      for (std::size_t i = 0; i < g.size(); ++i)
        if (trunc_ < 0 || (i / tstride_) % nt_ == 0) positions_[p++] = i;
    }

    std::vector<std::size_t> multi(g.rank());
    if (g.kind() == BackendKind::Torus4D) {
      const double ap = cp[0], am = cm[0];
      symbol_.resize(np_);
      for (std::size_t p = 0; p < np_; ++p) {
        g.index_to_multi(positions_[p], multi);
        const double sp = 0.25 * (g.d2_symbol(0, multi[0]) + g.d2_symbol(1, multi[1]));
        const double sm = 0.25 * (g.d2_symbol(2, multi[2]) + g.d2_symbol(3, multi[3]));
        symbol_[p] = ap * sp + am * sm;
      }
      if (bhat_[0] == cd(0.0)) throw Error(ErrorKind::InvalidArgument, "bordered solve: border column has zero mean");
      return;
    }

    const double h = g.spacing(std::size_t(trunc_));
    const SpMat d1 = from_triplets(nt_, stencil(nt_, h, 1, 1.0));
    const SpMat d2 = from_triplets(nt_, stencil(nt_, h, 2, 1.0));
    SpMat id{static_cast<Eigen::Index>(nt_), static_cast<Eigen::Index>(nt_)};
    id.setIdentity();
    const SpMat Cp = diag(cp), Cm = diag(cm);
    solvers_.resize(np_);
    for (std::size_t p = 0; p < np_; ++p) {
      SpMat A;
      if (g.kind() == BackendKind::HopfCylinder) {
        g.index_to_multi(positions_[p], multi);
        const cd k1(0.0, g.d1_symbol(1, multi[1]));
        const double k2 = g.d2_symbol(1, multi[1]);
        const SpMat sp = d2 + k1 * d1 + 0.25 * k2 * id;
        const SpMat sm = d2 - k1 * d1 + 0.25 * k2 * id;
        A = op.divergence ? SpMat(sp * Cp + sm * Cm) : SpMat(Cp * sp + Cm * sm);
      } else {
        const SpMat sp = 0.25 * d2;
        A = op.divergence ? SpMat(sp * Cp) : SpMat(Cp * sp);
      }
      if (p == 0) {
        std::vector<Eigen::Triplet<cd>> t;
        for (int k = 0; k < A.outerSize(); ++k)
          for (SpMat::InnerIterator it(A, k); it; ++it) t.emplace_back(int(it.row()), int(it.col()), it.value());
        for (std::size_t i = 0; i < nt_; ++i) {
          t.emplace_back(int(i), int(nt_), bhat_[positions_[0] + i * tstride_]);
          t.emplace_back(int(nt_), int(i), wt[i]);
        }
        A = from_triplets(nt_ + 1, t);
      }
      A.makeCompressed();
      solvers_[p] = std::make_unique<Solver>();
      solvers_[p]->compute(A);
      if (solvers_[p]->info() != Eigen::Success)
        throw Error(ErrorKind::NotConverged, "bordered solve: preconditioner factorization failed");
    }
  }

  /// (r, rho) -> approximate (x, kappa).
  void apply(const double* r, double rho, double* x, double& kappa) const {
    std::vector<cd> c(r, r + g_->size());
    transform(c, true);
    const double scale = double(np_);
    if (g_->kind() == BackendKind::Torus4D) {
      kappa = (c[0] / bhat_[0]).real();
      c[0] = scale * rho;
      for (std::size_t p = 1; p < np_; ++p) c[p] = (c[p] - kappa * bhat_[p]) / symbol_[p];
    } else {
      Eigen::VectorXcd line(long(nt_) + 1);
      for (std::size_t i = 0; i < nt_; ++i) line[long(i)] = c[positions_[0] + i * tstride_];
      line[long(nt_)] = scale * rho;
      Eigen::VectorXcd sol = solvers_[0]->solve(line);
      kappa = sol[long(nt_)].real();
      for (std::size_t i = 0; i < nt_; ++i) c[positions_[0] + i * tstride_] = sol[long(i)];
      Eigen::VectorXcd l2(static_cast<long>(nt_));
      for (std::size_t p = 1; p < np_; ++p) {
        const std::size_t base = positions_[p];
        for (std::size_t i = 0; i < nt_; ++i) l2[long(i)] = c[base + i * tstride_] - kappa * bhat_[base + i * tstride_];
        Eigen::VectorXcd s2 = solvers_[p]->solve(l2);
        for (std::size_t i = 0; i < nt_; ++i) c[base + i * tstride_] = s2[long(i)];
      }
    }
    transform(c, false);
    for (std::size_t i = 0; i < g_->size(); ++i) x[i] = c[i].real();
  }

 private:
  void transform(std::vector<cd>& c, bool forward) const {
    const Grid& g = *g_;
    std::vector<cd> line, res;
    for (std::size_t k = 0; k < periodic_.size(); ++k) {
      const std::size_t a = periodic_[k];
      const std::size_t n = g.extent(a), inner = g.stride(a), outer = g.size() / (n * inner);
      const Eigen::MatrixXcd& m = forward ? fwd_[k] : inv_[k];
      line.resize(n);
      for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < inner; ++i) {
          const std::size_t base = o * n * inner + i;
          for (std::size_t j = 0; j < n; ++j) line[j] = c[base + j * inner];
          Eigen::Map<Eigen::VectorXcd> v(line.data(), long(n));
          Eigen::VectorXcd y = m * v;
          for (std::size_t j = 0; j < n; ++j) c[base + j * inner] = y[long(j)];
        }
    }
  }

  GridPtr g_;
  std::vector<std::size_t> periodic_;
  int trunc_ = -1;
  std::size_t nt_ = 1, np_ = 1, tstride_ = 1;
  std::vector<Eigen::MatrixXcd> fwd_, inv_;
  std::vector<cd> bhat_;
  std::vector<std::size_t> positions_;
  std::vector<cd> symbol_;
  std::vector<std::unique_ptr<Solver>> solvers_;
};

}  // namespace

BorderedSolution solve_bordered(const SplitOperator& op, const ScalarField& border, const ScalarField& rhs, double gauge,
                                const KrylovOptions& opts) {
  require_same_grid(op.coeff_plus, op.coeff_minus);
  require_same_grid(op.coeff_plus, border);
  require_same_grid(op.coeff_plus, rhs);
  const GridPtr& g = rhs.grid();
  const std::size_t n = g->size();
  const long m = long(n) + 1;

  // Row equilibration for the non-divergence form; leaves the solution unchanged.
  if (!op.divergence && !opts.equilibrated) {
    ScalarField scale(g);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = std::max(std::abs(op.coeff_plus[i]), std::abs(op.coeff_minus[i]));
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    if (lo > 0.0 && hi > 100.0 * lo) {
      for (std::size_t i = 0; i < n; ++i)
        scale[i] = lo / std::max(std::abs(op.coeff_plus[i]), std::abs(op.coeff_minus[i]));
      KrylovOptions inner = opts;
      inner.equilibrated = true;
      const SplitOperator scaled{scale * op.coeff_plus, scale * op.coeff_minus, false};
      return solve_bordered(scaled, scale * border, scale * rhs, gauge, inner);
    }
  }

  std::vector<double> wmean(n);
  {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (wmean[i] = g->weight(i));
    for (double& v : wmean) v /= s;
  }
  ScalarField scratch(g);
  auto apply_aug = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    for (std::size_t i = 0; i < n; ++i) scratch[i] = v[long(i)];
    const ScalarField lx = op.apply(scratch);
    const double kap = v[long(n)];
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      out[long(i)] = lx[i] + kap * border[i];
      mean += wmean[i] * v[long(i)];
    }
    out[long(n)] = mean;
  };

  const ModalPreconditioner pre(op, border);
  auto precondition = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    double kap = 0.0;
    pre.apply(v.data(), v[long(n)], out.data(), kap);
    out[long(n)] = kap;
  };

  Eigen::VectorXd b(m);
  for (std::size_t i = 0; i < n; ++i) b[long(i)] = rhs[i];
  b[long(n)] = gauge;
  const double bnorm = b.norm();
  BorderedSolution out{ScalarField(g), 0.0, 0, 0.0};
  if (bnorm == 0.0) return out;

  // Start from the preconditioner's answer.
  Eigen::VectorXd x(m), r(m), tmp(m);
  precondition(b, x);
  apply_aug(x, tmp);
  r = b - tmp;
  double beta = r.norm();

  const int k = std::max(1, opts.restart);
  Eigen::MatrixXd V(m, k + 1), Z(m, k), H = Eigen::MatrixXd::Zero(k + 1, k);
  Eigen::VectorXd cs(k), sn(k), gvec(k + 1), w(m), z(m);
  int iters = 0;
  while (beta > opts.tol * bnorm && iters < opts.max_iter) {
    const double start = beta;
    V.col(0) = r / beta;
    gvec.setZero();
    gvec[0] = beta;
    H.setZero();
    int j = 0;
    for (; j < k && iters < opts.max_iter; ++j) {
      precondition(V.col(j), z);
      Z.col(j) = z;
      apply_aug(z, w);
      for (int i = 0; i <= j; ++i) {
        H(i, j) = w.dot(V.col(i));
        w -= H(i, j) * V.col(i);
      }
      H(j + 1, j) = w.norm();
      if (H(j + 1, j) > 0.0) V.col(j + 1) = w / H(j + 1, j);
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double den = std::hypot(H(j, j), H(j + 1, j));
      cs[j] = den > 0.0 ? H(j, j) / den : 1.0;
      sn[j] = den > 0.0 ? H(j + 1, j) / den : 0.0;
      H(j, j) = den;
      H(j + 1, j) = 0.0;
      gvec[j + 1] = -sn[j] * gvec[j];
      gvec[j] = cs[j] * gvec[j];
      ++iters;
      if (std::abs(gvec[j + 1]) <= opts.tol * bnorm || den == 0.0) {
        ++j;
        break;
      }
    }
    Eigen::VectorXd y = H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(gvec.head(j));
    x += Z.leftCols(j) * y;
    apply_aug(x, tmp);
    r = b - tmp;
    beta = r.norm();
    if (beta > 0.999 * start) break;
  }
  out.relative_residual = beta / bnorm;
  out.iterations = iters;
  if (!(beta <= opts.tol * bnorm)) {
    std::ostringstream msg;
    msg << "bordered solve: GMRES stopped at relative residual " << out.relative_residual << " after " << iters
        << " iterations (tol " << opts.tol << ")";
    throw Error(ErrorKind::NotConverged, msg.str());
  }
  for (std::size_t i = 0; i < n; ++i) out.x[i] = x[long(i)];
  out.kappa = x[long(n)];
  return out;
}

}  // namespace splitma
