#pragma once

// Twisted Monge-Ampere equation  lambda^p = e^{F + xi} eta^q  with
//   lambda = 1 + sigma+ second_plus(u) / f0+,   eta = 1 + sigma- second_minus(u) / f0-.
// (sigma+, sigma-) = (+1, -1) is the box deformation, (+1, +1) the projected i ddbar one.

#include <optional>
#include <string>
#include <vector>

#include "splitma/elliptic.hpp"

namespace splitma {

struct TmaProblem {
  SplitForm base;
  ScalarField F;
  double p = 1.0;
  double q = 1.0;
  int sigma_plus = 1;
  int sigma_minus = -1;
};

struct TmaOptions {
  double tol = 1e-11;  // sup norm of the logarithmic residual
  int max_newton = 30;
  int path_steps = 10;
  int max_halvings = 8;
  double floor = 1e-8;  // positivity floor for lambda and eta
  KrylovOptions krylov{};
  std::optional<ScalarField> initial;  // Newton start at t = 1 (falls back to the path)
};

struct PathStep {
  double t = 0.0;
  double min_lambda = 1.0, max_lambda = 1.0;
  double min_eta = 1.0, max_eta = 1.0;
  int newton_iterations = 0;
  double residual = 0.0;
};

struct EstimateCheck {
  std::string name;
  bool passed = true;
  double measured = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // >= 0 when the check holds
};

struct SolveReport {
  ScalarField u;
  double xi = 0.0;
  std::string method;
  bool converged = false;
  std::vector<double> residual_history;
  std::vector<PathStep> path;
  std::vector<EstimateCheck> checks;
  int newton_iterations = 0;
  int krylov_iterations = 0;
  int rejected_steps = 0;
  double final_residual = 0.0;
  double seconds = 0.0;
};

ScalarField tma_lambda(const TmaProblem& problem, const ScalarField& u);
ScalarField tma_eta(const TmaProblem& problem, const ScalarField& u);
/// omega_u = (f0+ lambda, f0- eta).
SplitForm deformed_metric(const TmaProblem& problem, const ScalarField& u);
/// p log lambda - q log eta - F - xi.
ScalarField tma_residual(const TmaProblem& problem, const ScalarField& u, double xi);

/// Throws Ellipticity unless p sigma+ > 0 and q sigma- < 0.
void check_ellipticity(const TmaProblem& problem);

/// Continuity path F_t = t F with Newton corrections. Throws NotConverged when
/// step halving is exhausted; the exception message carries the path state.
SolveReport solve_nonlinear(const TmaProblem& problem, const TmaOptions& opts = {});

/// p = q = 1, box deformation: xi by bracketed root search on the compatibility
/// integral, then one Chern-Poisson solve.
SolveReport solve_linear(const SplitForm& base, const ScalarField& F, const TmaOptions& opts = {});

/// Applicable to p in (0,1), q = 1, sigma = (+1,-1); empty otherwise.
std::vector<EstimateCheck> estimates_report(const TmaProblem& problem, const SolveReport& report);

/// Ric(omega_u) = Ric(omega_0) + box G.
SolveReport prescribe_bismut_ricci(const SplitForm& base, const ScalarField& G, const TmaOptions& opts = {});

/// Makes p log(f+ e^{W+}) + q log(f- e^{W-}) constant; xi is that constant.
SolveReport flatten_bundle(const SplitForm& base, double p, double q, const TmaOptions& opts = {});
/// The problem flatten_bundle hands to the nonlinear solver.
TmaProblem flatten_problem(const SplitForm& base, double p, double q);

}  // namespace splitma
