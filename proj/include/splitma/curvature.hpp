#pragma once

#include "splitma/split_forms.hpp"

namespace splitma {

/// Sign in Ric(omega_t) = epsilon (beta - alpha) omega'_t for the Hopf soliton family.
inline constexpr double kSolitonSign = -1.0;

struct MixedResidual {
  ScalarField diag_plus;
  ScalarField diag_minus;
  ComplexField cross;
  double sup_norm = 0.0;  // interior points only
};

/// Ric_B^{1,1} = -box(log f+ - log f-). Weight potentials are pluriharmonic and dropped.
SplitForm bismut_ricci(const SplitForm& omega);

/// (second_plus(u) f- + second_minus(u) f+) / (2 f+ f-).
ScalarField chern_laplacian(const SplitForm& omega, const ScalarField& u);

/// Full i ddbar of phi = p log(f+ e^{W+}) + q log(f- e^{W-}).
/// On Hopf grids the weight part must be single-valued (p alpha + q beta = 0).
MixedResidual bundle_flatness_residual(const SplitForm& omega, double p, double q);

/// phi itself (with the chart weight part when single-valued); shared by flatness and the flatten front-end.
ScalarField bundle_potential(const SplitForm& omega, double p, double q);

void require_positive(const SplitForm& omega, const char* who);

}  // namespace splitma
