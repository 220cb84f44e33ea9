#pragma once

// Bordered linear solves for second-order split operators
//
//   L x + kappa * border = rhs,   mean(x) = gauge
//
// by restarted GMRES with a modal (Fourier along periodic axes, sparse LU
// along the truncated axis) preconditioner built from averaged coefficients.

#include <memory>

#include "splitma/grid.hpp"

namespace splitma {

/// L u = a+ second_plus(u) + a- second_minus(u), or with the coefficients
/// moved inside the derivatives when `divergence` is set.
struct SplitOperator {
  ScalarField coeff_plus;
  ScalarField coeff_minus;
  bool divergence = false;

  ScalarField apply(const ScalarField& u) const;
};

struct KrylovOptions {
  double tol = 1e-11;  // relative to the augmented right-hand side
  int max_iter = 600;
  int restart = 80;
  bool equilibrated = false;  // set internally once rows are rescaled
};

struct BorderedSolution {
  ScalarField x;
  double kappa = 0.0;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Throws NotConverged when GMRES stalls above the requested tolerance.
BorderedSolution solve_bordered(const SplitOperator& op, const ScalarField& border, const ScalarField& rhs, double gauge,
                                const KrylovOptions& opts = {});

}  // namespace splitma
