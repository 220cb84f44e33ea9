#pragma once

// The SU family of metrics on the reduced Hopf cylinder.
//
// k solves k' = k(1-k)((beta-alpha)k + alpha), k(0) = 1/2. It is integrated in the
// logit variable L = log(k/(1-k)), L' = (beta-alpha)k + alpha, which keeps both
// k and 1-k to full relative precision in the exponential tails.

#include <vector>

#include "splitma/cohomology.hpp"

namespace splitma {

class KProfile {
 public:
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  const GridPtr& grid() const noexcept { return grid_; }

  double logit(double x) const;
  double k(double x) const;
  double one_minus_k(double x) const;
  double dk(double x) const;

  /// k(x + t) sampled on the grid.
  ScalarField sample(double t = 0.0) const;
  /// Largest per-interval residual |k(x+h) - k(x) - integral of f(k)| / h over the grid x-axis.
  double ode_residual() const;

  friend KProfile k_profile(double alpha, double beta, const GridPtr& grid);

 private:
  double advance(double x0, double L0, double x1) const;

  double alpha_ = 1.0, beta_ = 1.0;
  GridPtr grid_;
  std::vector<double> xs_, ls_;  // accepted integrator nodes, sorted in x
};

/// Adaptive Dormand-Prince integration outward from x = 0. Throws NotConverged on step-size underflow.
KProfile k_profile(double alpha, double beta, const GridPtr& grid);

/// omega_t = (k(x+t), 1 - k(x+t)).
SplitForm su_metric(const KProfile& profile, double t);
/// omega'_t = (k'(x+t), -k'(x+t)).
SplitForm su_prime(const KProfile& profile, double t);

/// Interior sup of Ric(omega_t) - kSolitonSign (beta - alpha) omega'_t.
double soliton_residual(const KProfile& profile, double t);

struct HopfBracketCheck {
  double t = 0.0;
  double with_base = 0.0;     // {omega_t, omega_0}, expected c t
  double prime_first = 0.0;   // {omega', omega_t}, expected c
  double prime_second = 0.0;  // {omega_t, omega'}
  double rel_err_base = 0.0;  // |with_base - c t| / |c t| (absolute when t = 0)
  double rel_err_prime = 0.0; // |prime_first - c| / c
};

struct HopfBracketConstants {
  double c = 0.0;  // 8 pi^2 / (alpha beta)
  std::vector<HopfBracketCheck> checks;
};

HopfBracketConstants hopf_bracket_constants(const KProfile& profile, const std::vector<double>& ts);

struct SuProjection {
  double s = 0.0;
  double t = 0.0;
  ScalarField u;
  double residual = 0.0;  // interior sup of Omega + box u - s omega_t
};

/// Throws NotInCone when the bracket coordinate p is not positive.
SuProjection project_to_su(const SplitForm& Omega, const KProfile& profile, const RealizeOptions& opts = {});

}  // namespace splitma
