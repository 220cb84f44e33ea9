#include "splitma/tma.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "splitma/curvature.hpp"

namespace splitma {

ScalarField tma_lambda(const TmaProblem& problem, const ScalarField& u) {
  ScalarField l = (double(problem.sigma_plus) * second_plus(u)) / problem.base.plus;
  l += 1.0;
  return l;
}

ScalarField tma_eta(const TmaProblem& problem, const ScalarField& u) {
  ScalarField e = (double(problem.sigma_minus) * second_minus(u)) / problem.base.minus;
  e += 1.0;
  return e;
}

SplitForm deformed_metric(const TmaProblem& problem, const ScalarField& u) {
  return {problem.base.plus * tma_lambda(problem, u), problem.base.minus * tma_eta(problem, u)};
}

ScalarField tma_residual(const TmaProblem& problem, const ScalarField& u, double xi) {
  ScalarField r = problem.p * log(tma_lambda(problem, u)) - problem.q * log(tma_eta(problem, u)) - problem.F;
  r += -xi;
  return r;
}

void check_ellipticity(const TmaProblem& problem) {
  if (!(problem.p * problem.sigma_plus > 0.0) || !(problem.q * problem.sigma_minus < 0.0)) {
    std::ostringstream msg;
    msg << "twisted Monge-Ampere problem is not elliptic: need p*sigma+ > 0 and q*sigma- < 0 (p=" << problem.p
        << ", q=" << problem.q << ", sigma=(" << problem.sigma_plus << "," << problem.sigma_minus << "))";
    throw Error(ErrorKind::Ellipticity, msg.str());
  }
}

namespace {

using Clock = std::chrono::steady_clock;

struct State {
  ScalarField u;
  double xi = 0.0;
};

struct Newton {
  const TmaProblem& pr;
  const TmaOptions& opts;
  SolveReport& rep;

  bool admissible(const ScalarField& lam, const ScalarField& eta) const {
    return lam.min() >= opts.floor && eta.min() >= opts.floor;
  }

  ScalarField residual(const ScalarField& lam, const ScalarField& eta, const ScalarField& Ft, double xi) const {
    ScalarField r = pr.p * log(lam) - pr.q * log(eta) - Ft;
    r += -xi;
    return r;
  }

  SplitOperator jacobian(const ScalarField& lam, const ScalarField& eta) const {
    ScalarField a = (lam * pr.base.plus).map([k = pr.p * pr.sigma_plus](double v) { return k / v; });
    ScalarField b = (eta * pr.base.minus).map([k = -pr.q * pr.sigma_minus](double v) { return k / v; });
    return {std::move(a), std::move(b), false};
  }

  /// Tangent of the solution branch: J(du, dxi) = F.
  bool tangent(const State& s, State& out) const {
    try {
      const ScalarField lam = tma_lambda(pr, s.u), eta = tma_eta(pr, s.u);
      auto sol = solve_bordered(jacobian(lam, eta), ScalarField(pr.F.grid(), -1.0), pr.F, 0.0, opts.krylov);
      rep.krylov_iterations += sol.iterations;
      out.u = std::move(sol.x);
      out.xi = sol.kappa;
      return true;
    } catch (const Error&) {
      return false;
    }
  }

  /// Newton at F_t = t F from s; true on convergence.
  bool solve(double t, State& s, int& iterations, double& res) const {
    const ScalarField Ft = t * pr.F;
    ScalarField lam = tma_lambda(pr, s.u), eta = tma_eta(pr, s.u);
    if (!admissible(lam, eta)) return false;
    ScalarField r = residual(lam, eta, Ft, s.xi);
    res = r.sup_norm();
    rep.residual_history.push_back(res);
    iterations = 0;
    for (int k = 0; k < opts.max_newton; ++k) {
      if (res <= opts.tol) return true;
      BorderedSolution step;
      try {
        step = solve_bordered(jacobian(lam, eta), ScalarField(pr.F.grid(), -1.0), -r, 0.0, opts.krylov);
      } catch (const Error&) {
        return false;
      }
      rep.krylov_iterations += step.iterations;
      bool accepted = false;
      double a = 1.0;
      for (int h = 0; h < 30 && !accepted; ++h, a *= 0.5) {
        ScalarField u = s.u + a * step.x;
        ScalarField l2 = tma_lambda(pr, u), e2 = tma_eta(pr, u);
        if (!admissible(l2, e2)) continue;
        const double xi = s.xi + a * step.kappa;
        ScalarField r2 = residual(l2, e2, Ft, xi);
        const double res2 = r2.sup_norm();
        if (res2 < res) {
          s.u = std::move(u);
          s.xi = xi;
          lam = std::move(l2);
          eta = std::move(e2);
          r = std::move(r2);
          res = res2;
          accepted = true;
        }
      }
      ++iterations;
      ++rep.newton_iterations;
      rep.residual_history.push_back(res);
      if (!accepted) return res <= 1e3 * opts.tol || below_noise(r, lam, eta, s.u);
    }
    return res <= opts.tol;
  }

  /// Pointwise check against the rounding error of the second derivatives.
  bool below_noise(const ScalarField& r, const ScalarField& lam, const ScalarField& eta, const ScalarField& u) const {
    const Grid& g = *u.grid();
    double h = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < g.rank(); ++a) h = std::min(h, g.spacing(a));
    const double d2 = 64.0 * std::numeric_limits<double>::epsilon() * u.sup_norm() / (h * h);
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double amp = std::abs(pr.p) / (lam[i] * pr.base.plus[i]) + std::abs(pr.q) / (eta[i] * pr.base.minus[i]);
      if (std::abs(r[i]) > opts.tol + d2 * amp) return false;
    }
    return true;
  }

  PathStep record(double t, const State& s, int iterations, double res) const {
    const ScalarField lam = tma_lambda(pr, s.u), eta = tma_eta(pr, s.u);
    return {t, lam.min(), lam.max(), eta.min(), eta.max(), iterations, res};
  }
};

void finish(const TmaProblem& pr, State& s, SolveReport& rep, Clock::time_point start) {
  s.u += -s.u.min();
  rep.u = s.u;
  rep.xi = s.xi;
  rep.final_residual = tma_residual(pr, s.u, s.xi).sup_norm();
  rep.converged = true;
  rep.checks = estimates_report(pr, rep);
  rep.seconds = std::chrono::duration<double>(Clock::now() - start).count();
}

void require_pluriclosed(const SplitForm& omega, const char* who) {
  const double r = pluriclosed_residual(omega);
  if (r > 1e-6 * std::max(1.0, form_scale(omega))) {
    std::ostringstream msg;
    msg << who << ": base metric is not pluriclosed (residual " << r << ")";
    throw Error(ErrorKind::NotPluriclosed, msg.str());
  }
}

}  // namespace

SolveReport solve_nonlinear(const TmaProblem& problem, const TmaOptions& opts) {
  const auto start = Clock::now();
  check_ellipticity(problem);
  require_positive(problem.base, "solve_nonlinear");
  require_same_grid(problem.base.plus, problem.F);
  if (!problem.F.finite()) throw Error(ErrorKind::InvalidArgument, "solve_nonlinear: F is not finite");
  if (opts.path_steps < 1) throw Error(ErrorKind::InvalidArgument, "solve_nonlinear: path_steps must be >= 1");

  SolveReport rep;
  rep.method = "continuity-newton";
  const Newton newton{problem, opts, rep};
  State s{ScalarField(problem.F.grid(), 0.0), 0.0};

  if (opts.initial) {
    State trial{*opts.initial, 0.0};
    require_same_grid(trial.u, problem.F);
    trial.u += -trial.u.mean();
    const ScalarField lam = tma_lambda(problem, trial.u), eta = tma_eta(problem, trial.u);
    if (newton.admissible(lam, eta)) {
      trial.xi = newton.residual(lam, eta, problem.F, 0.0).mean();
      int its = 0;
      double res = 0.0;
      if (newton.solve(1.0, trial, its, res)) {
        rep.method = "newton";
        rep.path.push_back(newton.record(1.0, trial, its, res));
        finish(problem, trial, rep, start);
        return rep;
      }
    }
    rep.residual_history.clear();
  }

  double t = 0.0, dt = 1.0 / opts.path_steps;
  int halvings = 0;
  while (t < 1.0) {
    double tn = std::min(1.0, t + dt);
    if (1.0 - tn < 1e-12) tn = 1.0;
    State trial = s;
    State tan;
    if (newton.tangent(s, tan)) {
      State pred{s.u + (tn - t) * tan.u, s.xi + (tn - t) * tan.xi};
      if (newton.admissible(tma_lambda(problem, pred.u), tma_eta(problem, pred.u))) trial = std::move(pred);
    }
    int its = 0;
    double res = 0.0;
    if (newton.solve(tn, trial, its, res)) {
      s = std::move(trial);
      t = tn;
      rep.path.push_back(newton.record(t, s, its, res));
    } else {
      ++rep.rejected_steps;
      dt *= 0.5;
      if (++halvings > opts.max_halvings) {
        std::ostringstream msg;
        msg << "solve_nonlinear: Newton failed at t=" << tn << " after " << opts.max_halvings
            << " step halvings; last accepted t=" << t << ", last residual " << res;
        throw Error(ErrorKind::NotConverged, msg.str());
      }
    }
  }
  finish(problem, s, rep, start);
  return rep;
}

SolveReport solve_linear(const SplitForm& base, const ScalarField& F, const TmaOptions& opts) {
  const auto start = Clock::now();
  require_positive(base, "solve_linear");
  require_pluriclosed(base, "solve_linear");
  require_same_grid(base.plus, F);
  if (!F.finite()) throw Error(ErrorKind::InvalidArgument, "solve_linear: F is not finite");
  const TmaProblem problem{base, F, 1.0, 1.0, 1, -1};
  SolveReport rep;
  rep.method = "linear-bisection";
  const ScalarField vol = base.plus * base.minus;

  State s{ScalarField(F.grid(), 0.0), 0.0};
  const double lo0 = -F.max(), hi0 = -F.min();
  if (hi0 - lo0 <= 1e-14 * (1.0 + std::abs(lo0))) {
    s.xi = -0.5 * (F.max() + F.min());
  } else {
    GauduchonOptions gopts;
    gopts.tol = 1e-12;
    gopts.krylov = opts.krylov;
    ScalarField warm(F.grid(), 0.0);
    auto eval = [&](double xi) {
      ScalarField e = exp(F);
      e *= std::exp(xi);
      const SplitForm tilde{e * base.plus, base.minus};
      gopts.initial = warm;
      auto gf = gauduchon_factor(tilde, gopts);
      warm = gf.f;
      rep.newton_iterations += gf.iterations;
      ScalarField em1 = e;
      em1 += -1.0;
      const ScalarField w = exp(gf.f) * vol;
      return std::pair{integrate(w * em1), integrate(w)};
    };
    double lo = lo0, hi = hi0;
    auto [glo, scale] = eval(lo);
    auto [ghi, scale_hi] = eval(hi);
    (void)scale_hi;
    if (glo > 0.0 || ghi < 0.0) throw Error(ErrorKind::NotConverged, "solve_linear: compatibility integral does not change sign");
    // Illinois-modified regula falsi keeps the bracket of plain bisection.
    int side = 0;
    double xi = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      xi = (lo * ghi - hi * glo) / (ghi - glo);
      if (!(xi > lo && xi < hi)) xi = 0.5 * (lo + hi);
      auto [g, sc] = eval(xi);
      rep.residual_history.push_back(std::abs(g) / sc);
      if (std::abs(g) <= 1e-12 * sc || hi - lo <= 1e-14 * (1.0 + std::abs(xi))) break;
      if (g < 0.0) {
        lo = xi;
        glo = g;
        if (side == -1) ghi *= 0.5;
        side = -1;
      } else {
        hi = xi;
        ghi = g;
        if (side == 1) glo *= 0.5;
        side = 1;
      }
    }
    s.xi = xi;
    ScalarField e = exp(F);
    e *= std::exp(xi);
    const SplitForm tilde{e * base.plus, base.minus};
    PoissonOptions popts;
    popts.krylov = opts.krylov;
    popts.gauduchon = warm;
    const ScalarField rhs = 0.5 * (ScalarField(F.grid(), 1.0) - ScalarField(F.grid(), 1.0) / e);
    s.u = chern_poisson_solve(tilde, rhs, popts);
  }
  Newton probe{problem, opts, rep};
  finish(problem, s, rep, start);
  rep.path.push_back(probe.record(1.0, s, 0, rep.final_residual));
  rep.checks = estimates_report(problem, rep);
  return rep;
}

std::vector<EstimateCheck> estimates_report(const TmaProblem& problem, const SolveReport& report) {
  std::vector<EstimateCheck> out;
  const double beta = problem.p;
  if (!(beta > 0.0 && beta < 1.0) || problem.q != 1.0 || problem.sigma_plus != 1 || problem.sigma_minus != -1) return out;
  if (report.u.size() == 0) return out;

  const double fsup = problem.F.sup_norm();
  out.push_back({"parameter_bound", std::abs(report.xi) <= fsup + 1e-8, std::abs(report.xi), fsup, fsup - std::abs(report.xi)});

  const ScalarField lam = tma_lambda(problem, report.u), eta = tma_eta(problem, report.u);
  ScalarField efx = exp(problem.F);
  efx *= std::exp(report.xi);
  const double C = efx.max();
  const double lower = -(1.0 - beta) * std::pow(C, 1.0 / (1.0 - beta));
  const double lap_min = (lam - eta).min();
  out.push_back({"laplacian_lower_bound", lap_min >= lower - 1e-10, lap_min, lower, lap_min - lower});

  // -Lu = beta/lambda - e^{F+xi}/lambda^beta + 1 - beta with
  // Lu = beta (second_plus u / f0+) / lambda + (second_minus u / f0-) / eta.
  const ScalarField Lu = beta * ((second_plus(report.u) / problem.base.plus) / lam) + (second_minus(report.u) / problem.base.minus) / eta;
  ScalarField rhs = beta * (ScalarField(lam.grid(), 1.0) / lam) - efx / lam.map([beta](double v) { return std::pow(v, beta); });
  rhs += 1.0 - beta;
  const double lu = (rhs + Lu).sup_norm();
  out.push_back({"lu_identity", lu < 1e-8, lu, 1e-8, 1e-8 - lu});

  const double l1 = integrate(report.u.map([](double v) { return std::abs(v); })) / integrate(ScalarField(lam.grid(), 1.0));
  out.push_back({"l1_norm", true, l1, 0.0, 0.0});
  out.push_back({"sup_u", true, report.u.max(), 0.0, 0.0});

  double path_min = lam.min();
  for (const auto& st : report.path) path_min = std::min({path_min, st.min_lambda});
  out.push_back({"path_min_lambda", path_min > 0.0, path_min, 0.0, path_min});
  return out;
}

SolveReport prescribe_bismut_ricci(const SplitForm& base, const ScalarField& G, const TmaOptions& opts) {
  SolveReport rep = solve_linear(base, -1.0 * G, opts);
  rep.method = "prescribe-ricci";
  return rep;
}

TmaProblem flatten_problem(const SplitForm& base, double p, double q) {
  if (p == 0.0 || q == 0.0) throw Error(ErrorKind::Ellipticity, "flatten_bundle: p and q must be nonzero");
  TmaProblem pr;
  pr.base = base;
  pr.F = -1.0 * bundle_potential(base, p, q);
  pr.p = p;
  pr.q = -q;
  pr.sigma_plus = p > 0.0 ? 1 : -1;
  pr.sigma_minus = q > 0.0 ? 1 : -1;
  return pr;
}

SolveReport flatten_bundle(const SplitForm& base, double p, double q, const TmaOptions& opts) {
  const TmaProblem pr = flatten_problem(base, p, q);
  SolveReport rep = solve_nonlinear(pr, opts);
  rep.method = "flatten-bundle";
  const double flat = bundle_flatness_residual(deformed_metric(pr, rep.u), p, q).sup_norm;
  rep.checks.push_back({"bundle_flatness", flat <= 1e-6, flat, 1e-6, 1e-6 - flat});
  return rep;
}

}  // namespace splitma
