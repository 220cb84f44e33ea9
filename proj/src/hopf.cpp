#include "splitma/hopf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "splitma/curvature.hpp"

namespace splitma {

namespace {

double logistic(double L) {
  if (L >= 0.0) return 1.0 / (1.0 + std::exp(-L));
  const double e = std::exp(L);
  return e / (1.0 + e);
}

struct Rhs {
  double alpha, beta;
  double operator()(double L) const { return (beta - alpha) * logistic(L) + alpha; }
};

// One Dormand-Prince step; returns the 5th-order value and the embedded error.
std::pair<double, double> dp_step(const Rhs& f, double y, double h) {
  const double k1 = f(y);
  const double k2 = f(y + h * (1.0 / 5.0) * k1);
  const double k3 = f(y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
  const double k4 = f(y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
  const double k5 = f(y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 + 64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
  const double k6 = f(y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 + 46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                               5103.0 / 18656.0 * k5));
  const double y5 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 - 2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
  const double k7 = f(y5);
  const double y4 = y + h * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 + 393.0 / 640.0 * k4 - 92097.0 / 339200.0 * k5 +
                             187.0 / 2100.0 * k6 + 1.0 / 40.0 * k7);
  return {y5, std::abs(y5 - y4)};
}

void require_matching_grid(const KProfile& p) {
  const Grid& g = *p.grid();
  if (g.kind() != BackendKind::HopfCylinder) throw Error(ErrorKind::UnsupportedBackend, "hopf: needs a HopfCylinder grid");
}

}  // namespace

double KProfile::advance(double x0, double L0, double x1) const {
  const Rhs f{alpha_, beta_};
  const double span = x1 - x0;
  const int n = std::max(1, int(std::ceil(std::abs(span) / 0.01)));
  const double h = span / n;
  double L = L0;
  for (int i = 0; i < n; ++i) L = dp_step(f, L, h).first;
  return L;
}

double KProfile::logit(double x) const {
  auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
  std::size_t j = std::size_t(it - xs_.begin());
  if (j == xs_.size()) j = xs_.size() - 1;
  if (j > 0 && std::abs(xs_[j - 1] - x) < std::abs(xs_[j] - x)) --j;
  if (xs_[j] == x) return ls_[j];
  return advance(xs_[j], ls_[j], x);
}

double KProfile::k(double x) const { return logistic(logit(x)); }
double KProfile::one_minus_k(double x) const { return logistic(-logit(x)); }

double KProfile::dk(double x) const {
  const double L = logit(x);
  const double kk = logistic(L), km = logistic(-L);
  return kk * km * ((beta_ - alpha_) * kk + alpha_);
}

ScalarField KProfile::sample(double t) const {
  const Grid& g = *grid_;
  const std::size_t nx = g.extent(0), ns = g.extent(1);
  ScalarField out(grid_);
  for (std::size_t i = 0; i < nx; ++i) {
    const double v = k(g.coordinate(0, i) + t);
    for (std::size_t j = 0; j < ns; ++j) out[i * ns + j] = v;
  }
  return out;
}

double KProfile::ode_residual() const {
  static constexpr double nodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
  static constexpr double weights[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                                        0.2369268850561891};
  const Grid& g = *grid_;
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < g.extent(0); ++i) {
    const double a = g.coordinate(0, i), b = g.coordinate(0, i + 1), h = b - a;
    double quad = 0.0;
    for (int q = 0; q < 5; ++q) quad += weights[q] * dk(0.5 * (a + b) + 0.5 * h * nodes[q]);
    quad *= 0.5 * h;
    worst = std::max(worst, std::abs(k(b) - k(a) - quad) / h);
  }
  return worst;
}

KProfile k_profile(double alpha, double beta, const GridPtr& grid) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw Error(ErrorKind::InvalidArgument, "k_profile: alpha and beta must be positive");
  if (!grid || grid->kind() != BackendKind::HopfCylinder) throw Error(ErrorKind::UnsupportedBackend, "k_profile: needs a HopfCylinder grid");
  if (std::abs(grid->spec().alpha - alpha) > 1e-14 || std::abs(grid->spec().beta - beta) > 1e-14)
    throw Error(ErrorKind::InvalidArgument, "k_profile: grid (alpha, beta) does not match");
  KProfile p;
  p.alpha_ = alpha;
  p.beta_ = beta;
  p.grid_ = grid;
  const Rhs f{alpha, beta};
  const double R = grid->spec().axes[0].hi + 5.0;
  const double tol = 1e-13;
  std::vector<double> xr{0.0}, lr{0.0}, xl, ll;
  for (int dir : {1, -1}) {
    auto& xs = dir > 0 ? xr : xl;
    auto& ls = dir > 0 ? lr : ll;
    double x = 0.0, L = 0.0, h = 0.01 * dir;
    while (std::abs(x) < R) {
      if (std::abs(x + h) > R) h = dir * (R - std::abs(x));
      auto [y, err] = dp_step(f, L, h);
      const double scale = tol * (1.0 + std::abs(L));
      if (err <= scale) {
        x += h;
        L = y;
        xs.push_back(x);
        ls.push_back(L);
      }
      const double fac = err > 0.0 ? 0.9 * std::pow(scale / err, 0.2) : 5.0;
      h *= std::clamp(fac, 0.2, 5.0);
      if (std::abs(h) > 0.05) h = 0.05 * dir;
      if (std::abs(h) < 1e-12) throw Error(ErrorKind::NotConverged, "k_profile: step size underflow");
    }
  }
  for (std::size_t i = xl.size(); i-- > 0;) {
    p.xs_.push_back(xl[i]);
    p.ls_.push_back(ll[i]);
  }
  p.xs_.insert(p.xs_.end(), xr.begin(), xr.end());
  p.ls_.insert(p.ls_.end(), lr.begin(), lr.end());
  return p;
}

SplitForm su_metric(const KProfile& profile, double t) {
  require_matching_grid(profile);
  const Grid& g = *profile.grid();
  const std::size_t nx = g.extent(0), ns = g.extent(1);
  ScalarField a(profile.grid()), b(profile.grid());
  for (std::size_t i = 0; i < nx; ++i) {
    const double x = g.coordinate(0, i) + t;
    const double ka = profile.k(x), kb = profile.one_minus_k(x);
    for (std::size_t j = 0; j < ns; ++j) {
      a[i * ns + j] = ka;
      b[i * ns + j] = kb;
    }
  }
  return {std::move(a), std::move(b)};
}

SplitForm su_prime(const KProfile& profile, double t) {
  require_matching_grid(profile);
  const Grid& g = *profile.grid();
  const std::size_t nx = g.extent(0), ns = g.extent(1);
  ScalarField a(profile.grid());
  for (std::size_t i = 0; i < nx; ++i) {
    const double v = profile.dk(g.coordinate(0, i) + t);
    for (std::size_t j = 0; j < ns; ++j) a[i * ns + j] = v;
  }
  return {a, -1.0 * a};
}

double soliton_residual(const KProfile& profile, double t) {
  const double lead = kSolitonSign * (profile.beta() - profile.alpha());
  return interior_form_norm(bismut_ricci(su_metric(profile, t)) - lead * su_prime(profile, t));
}

HopfBracketConstants hopf_bracket_constants(const KProfile& profile, const std::vector<double>& ts) {
  HopfBracketConstants out;
  out.c = 8.0 * std::numbers::pi * std::numbers::pi / (profile.alpha() * profile.beta());
  const SplitForm w0 = su_metric(profile, 0.0), wp = su_prime(profile, 0.0);
  for (double t : ts) {
    const SplitForm wt = su_metric(profile, t);
    HopfBracketCheck ch;
    ch.t = t;
    ch.with_base = bracket(wt, w0).value;
    ch.prime_first = bracket(wp, wt).value;
    ch.prime_second = bracket(wt, wp).value;
    const double ct = out.c * t;
    ch.rel_err_base = t != 0.0 ? std::abs(ch.with_base - ct) / std::abs(ct) : std::abs(ch.with_base);
    ch.rel_err_prime = std::abs(ch.prime_first - out.c) / out.c;
    out.checks.push_back(ch);
  }
  return out;
}

SuProjection project_to_su(const SplitForm& Omega, const KProfile& profile, const RealizeOptions& opts) {
  require_matching_grid(profile);
  if (!Omega.grid() || !Omega.grid()->same_as(*profile.grid())) throw Error(ErrorKind::GridMismatch, "project_to_su: form and profile live on different grids");
  const double pr = pluriclosed_residual(Omega);
  if (pr > opts.pluriclosed_tol * std::max(1.0, form_scale(Omega)))
    throw Error(ErrorKind::NotPluriclosed, "project_to_su: input is not pluriclosed");
  const ConeCoordinates cc = cone_coordinates(Omega, su_metric(profile, 0.0), su_prime(profile, 0.0));
  if (!(cc.p > 0.0)) throw Error(ErrorKind::NotInCone, "project_to_su: class is not in the positive cone (p <= 0)");
  SuProjection out;
  out.s = cc.p;
  out.t = cc.q / cc.p;
  const SplitForm wt = su_metric(profile, out.t);
  out.u = realize_proportional(Omega, wt, opts).u;
  out.residual = interior_form_norm(Omega + box(out.u) - out.s * wt);
  return out;
}

}  // namespace splitma
