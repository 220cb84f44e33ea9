#pragma once

#include "splitma/elliptic.hpp"

namespace splitma {

struct RealizeOptions {
  double bracket_tol = 1e-6;      // relative to the integral of |w1+ w2-| + |w1- w2+|
  double pluriclosed_tol = 1e-6;  // relative to the component scale
  KrylovOptions krylov{};
};

struct Realization {
  ScalarField u;
  double c = 0.0;
  double ratio_spread = 0.0;  // interior sup of |(w1 + box u)+- / w2+- - c|
};

/// u, c with w1 + box u = c w2; needs w2 positive pluriclosed and {w1, w2} = 0.
Realization realize_proportional(const SplitForm& w1, const SplitForm& w2, const RealizeOptions& opts = {});

struct Decomposition {
  double rA = 0.0;
  double rB = 0.0;
  ScalarField u;
  double residual = 0.0;  // interior sup of omega - rA A - rB B - box u
};

/// omega = rA A + rB B + box u.
Decomposition decompose(const SplitForm& omega, const SplitForm& basisA, const SplitForm& basisB,
                        const RealizeOptions& opts = {});

/// Gauduchon-normalized e^t f0+ Theta+ + e^-t f0- Theta- scaled to unit total volume.
SplitForm conformal_family(const SplitForm& base, double t);

struct ConeCoordinates {
  double p = 0.0;
  double q = 0.0;
  bool in_cone = false;  // p > 0
};

/// [Omega] = p [ref] + q [prime] in bracket coordinates.
ConeCoordinates cone_coordinates(const SplitForm& Omega, const SplitForm& ref, const SplitForm& prime);

/// Interior sup norm of both components.
double interior_form_norm(const SplitForm& w);

}  // namespace splitma
