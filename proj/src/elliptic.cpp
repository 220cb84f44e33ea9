#include "splitma/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "splitma/curvature.hpp"

namespace splitma {

namespace {

ScalarField gauduchon_operator(const SplitForm& omega, const ScalarField& f, double* scale) {
  const ScalarField e = exp(f);
  const ScalarField a = second_minus(e * omega.plus), b = second_plus(e * omega.minus);
  if (scale) *scale = std::max(a.sup_norm() + b.sup_norm(), form_scale(conformal(f, omega)));
  return a + b;
}

void normalize(const SplitForm& omega, ScalarField& f) {
  const ScalarField vol = omega.plus * omega.minus;
  const double c = -0.5 * std::log(integrate(exp(2.0 * f) * vol) / integrate(vol));
  f += c;
}

}  // namespace

double gauduchon_residual(const SplitForm& omega, const ScalarField& f) {
  double scale = 0.0;
  const ScalarField n = gauduchon_operator(omega, f, &scale);
  return scale > 0.0 ? n.sup_norm() / scale : 0.0;
}

GauduchonResult gauduchon_factor(const SplitForm& omega, const GauduchonOptions& opts) {
  require_positive(omega, "gauduchon_factor");
  GauduchonResult out;
  out.f = opts.initial ? *opts.initial : ScalarField(omega.grid(), 0.0);
  require_same_grid(out.f, omega.plus);
  normalize(omega, out.f);
  const ScalarField ones(omega.grid(), 1.0);
  double rel = gauduchon_residual(omega, out.f);
  out.residual_history.push_back(rel);
  bool done = rel <= opts.tol;
  for (int it = 0; !done && it < opts.max_iter; ++it) {
    double scale = 0.0;
    const ScalarField n = gauduchon_operator(omega, out.f, &scale);
    const ScalarField e = exp(out.f);
    const SplitOperator jac{e * omega.minus, e * omega.plus, true};
    const ScalarField step = solve_bordered(jac, ones, -n, 0.0, opts.krylov).x;
    double t = 1.0;
    ScalarField trial = out.f;
    double trial_rel = rel;
    for (int k = 0; k < 8; ++k, t *= 0.5) {
      trial = out.f + t * step;
      normalize(omega, trial);
      trial_rel = gauduchon_residual(omega, trial);
      if (trial_rel < rel) break;
    }
    out.f = std::move(trial);
    ++out.iterations;
    const bool small_step = t * step.sup_norm() <= 1e-13 * (1.0 + out.f.sup_norm());
    // On truncated charts the discrete equation only holds up to the bordered
    // constant, so a vanishing Newton step also counts as convergence.
    done = trial_rel <= opts.tol || (small_step && trial_rel < 1e-6);
    rel = trial_rel;
    out.residual_history.push_back(rel);
  }
  out.residual = rel;
  if (!done) {
    std::ostringstream msg;
    msg << "gauduchon_factor: Newton did not converge; residual history:";
    for (double r : out.residual_history) msg << ' ' << r;
    throw Error(ErrorKind::NotConverged, msg.str());
  }
  return out;
}

ScalarField chern_poisson_solve(const SplitForm& omega, const ScalarField& v, const PoissonOptions& opts) {
  require_positive(omega, "chern_poisson_solve");
  require_same_grid(omega.plus, v);
  const ScalarField f = opts.gauduchon ? *opts.gauduchon : gauduchon_factor(omega).f;
  const ScalarField vol = 2.0 * (omega.plus * omega.minus);
  const ScalarField weight = exp(f) * vol;
  const double compat = integrate(v * weight);
  const double ref = v.sup_norm() * integrate(weight);
  if (std::abs(compat) > opts.compat_tol * ref) {
    std::ostringstream msg;
    msg << "chern_poisson_solve: incompatible right-hand side, integral of v e^f omega^2 = " << compat;
    throw Error(ErrorKind::Incompatible, msg.str());
  }
  if (v.sup_norm() == 0.0) return ScalarField(v.grid(), 0.0);
  const SplitOperator op{omega.minus, omega.plus, false};
  return solve_bordered(op, ScalarField(v.grid(), 1.0), vol * v, 0.0, opts.krylov).x;
}

}  // namespace splitma
