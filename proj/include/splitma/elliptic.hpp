#pragma once

#include <optional>
#include <vector>

#include "splitma/krylov.hpp"
#include "splitma/split_forms.hpp"

namespace splitma {

struct GauduchonOptions {
  double tol = 1e-10;  // relative residual of the pluriclosed equation
  int max_iter = 40;
  std::optional<ScalarField> initial;  // warm start
  KrylovOptions krylov{};
};

struct GauduchonResult {
  ScalarField f;
  std::vector<double> residual_history;
  int iterations = 0;
  double residual = 0.0;
};

/// Unique f with e^f omega pluriclosed and integral of e^{2f} f+ f- equal to that of f+ f-.
GauduchonResult gauduchon_factor(const SplitForm& omega, const GauduchonOptions& opts = {});

/// Relative residual of the pluriclosed equation for e^f omega.
double gauduchon_residual(const SplitForm& omega, const ScalarField& f);

struct PoissonOptions {
  double compat_tol = 1e-8;
  KrylovOptions krylov{};
  std::optional<ScalarField> gauduchon;  // precomputed factor of omega
};

/// Mean-zero u with chern_laplacian(omega, u) = v. Throws Incompatible when
/// the integral of v e^f omega^2 is not negligible.
ScalarField chern_poisson_solve(const SplitForm& omega, const ScalarField& v, const PoissonOptions& opts = {});

}  // namespace splitma
