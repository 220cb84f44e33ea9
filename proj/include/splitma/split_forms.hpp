#pragma once

#include "splitma/backends.hpp"

namespace splitma {

struct BracketValue {
  double value = 0.0;
  double error = 0.0;  // |full-grid - half-grid quadrature|
};

/// box u = i(d+ dbar+ - d- dbar-)u = (second_plus u, -second_minus u).
SplitForm box(const ScalarField& u);
/// Projected i ddbar u = (second_plus u, second_minus u).
SplitForm pi_ddbar(const ScalarField& u);
/// (f+, f-) -> (f+, -f-).
SplitForm involution(const SplitForm& eta);

/// {eta, gamma} = integral of eta+ gamma- - eta- gamma+.
/// On Hopf grids the integral beyond +-X is added assuming the integrand decays
/// like e^{alpha x} on the left and e^{-beta x} on the right (true for smooth forms).
BracketValue bracket(const SplitForm& eta, const SplitForm& gamma);

/// Integral of v beyond the truncated Hopf ends under that decay model; 0 elsewhere.
double hopf_tail(const ScalarField& v);

/// Sup over interior points of |second_minus(f+) + second_plus(f-)|.
double pluriclosed_residual(const SplitForm& omega);
/// Sup over interior points of |second_plus(f-) - second_minus(f+)|.
double boxclosed_residual(const SplitForm& omega);

bool is_positive(const SplitForm& omega, double floor = 0.0);

/// Largest component magnitude; used to scale tolerance gates.
double form_scale(const SplitForm& omega);

}  // namespace splitma
