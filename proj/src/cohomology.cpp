#include "splitma/cohomology.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "splitma/curvature.hpp"

namespace splitma {

namespace {

double bracket_scale(const SplitForm& a, const SplitForm& b) {
  auto absf = [](const ScalarField& f) { return f.map([](double v) { return std::abs(v); }); };
  return integrate(absf(a.plus * b.minus) + absf(a.minus * b.plus));
}

}  // namespace

double interior_form_norm(const SplitForm& w) { return std::max(w.plus.interior_sup_norm(), w.minus.interior_sup_norm()); }

Realization realize_proportional(const SplitForm& w1, const SplitForm& w2, const RealizeOptions& opts) {
  require_same_grid(w1.plus, w2.plus);
  require_positive(w2, "realize_proportional");
  const double pr = pluriclosed_residual(w2);
  if (pr > opts.pluriclosed_tol * std::max(1.0, form_scale(w2))) {
    std::ostringstream msg;
    msg << "realize_proportional: target form is not pluriclosed (residual " << pr << ")";
    throw Error(ErrorKind::NotPluriclosed, msg.str());
  }
  const double b = bracket(w1, w2).value;
  if (std::abs(b) > opts.bracket_tol * std::max(bracket_scale(w1, w2), 1e-300)) {
    std::ostringstream msg;
    msg << "realize_proportional: classes are not proportional, bracket {w1, w2} = " << b;
    throw Error(ErrorKind::Incompatible, msg.str());
  }
  const GridPtr& g = w2.grid();
  Realization out;
  const ScalarField rhs = w2.plus * w1.minus - w2.minus * w1.plus;
  if (rhs.sup_norm() == 0.0) {
    out.u = ScalarField(g, 0.0);
  } else {
    const SplitOperator op{w2.minus, w2.plus, false};
    out.u = solve_bordered(op, ScalarField(g, 1.0), rhs, 0.0, opts.krylov).x;
  }
  const SplitForm lifted = w1 + box(out.u);
  out.c = integrate(lifted.plus * w2.minus + lifted.minus * w2.plus) / integrate(2.0 * (w2.plus * w2.minus));
  ScalarField rp = lifted.plus / w2.plus, rm = lifted.minus / w2.minus;
  rp += -out.c;
  rm += -out.c;
  out.ratio_spread = std::max(rp.interior_sup_norm(), rm.interior_sup_norm());
  return out;
}

Decomposition decompose(const SplitForm& omega, const SplitForm& A, const SplitForm& B, const RealizeOptions& opts) {
  require_same_grid(omega.plus, A.plus);
  require_same_grid(omega.plus, B.plus);
  for (const SplitForm* w : {&omega, &A, &B}) {
    const double r = pluriclosed_residual(*w);
    if (r > opts.pluriclosed_tol * std::max(1.0, form_scale(*w)))
      throw Error(ErrorKind::NotPluriclosed, "decompose: inputs must be pluriclosed");
  }
  const double ab = bracket(A, B).value;
  if (std::abs(ab) <= 1e-8 * bracket_scale(A, B)) throw Error(ErrorKind::DegenerateBasis, "decompose: {A, B} vanishes");
  Decomposition out;
  out.rA = bracket(omega, B).value / ab;
  out.rB = bracket(omega, A).value / (-ab);
  const SplitForm rho = omega - out.rA * A - out.rB * B;
  const SplitForm* P = is_positive(A) ? &A : is_positive(B) ? &B : nullptr;
  if (!P) throw Error(ErrorKind::NonPositive, "decompose: neither basis form is positive");
  const Realization r = realize_proportional(rho + *P, *P, opts);
  out.u = -1.0 * r.u;
  out.residual = interior_form_norm(omega - out.rA * A - out.rB * B - box(out.u));
  return out;
}

SplitForm conformal_family(const SplitForm& base, double t) {
  require_positive(base, "conformal_family");
  const SplitForm tilde{std::exp(t) * base.plus, std::exp(-t) * base.minus};
  SplitForm w = conformal(gauduchon_factor(tilde).f, tilde);
  const double vol = integrate(2.0 * (w.plus * w.minus));
  return (1.0 / std::sqrt(vol)) * w;
}

ConeCoordinates cone_coordinates(const SplitForm& Omega, const SplitForm& ref, const SplitForm& prime) {
  const double rp = bracket(ref, prime).value;
  if (std::abs(rp) <= 1e-8 * bracket_scale(ref, prime)) throw Error(ErrorKind::DegenerateBasis, "cone_coordinates: {ref, prime} vanishes");
  ConeCoordinates c;
  c.p = bracket(Omega, prime).value / rp;
  c.q = bracket(Omega, ref).value / (-rp);
  c.in_cone = c.p > 0.0;
  return c;
}

}  // namespace splitma
