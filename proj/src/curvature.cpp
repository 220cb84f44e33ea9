#include "splitma/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace splitma {

void require_positive(const SplitForm& omega, const char* who) {
  if (!is_positive(omega, 0.0)) throw Error(ErrorKind::NonPositive, std::string(who) + ": metric is not positive");
}

SplitForm bismut_ricci(const SplitForm& omega) {
  require_positive(omega, "bismut_ricci");
  return -1.0 * box(log(omega.plus) - log(omega.minus));
}

ScalarField chern_laplacian(const SplitForm& omega, const ScalarField& u) {
  require_positive(omega, "chern_laplacian");
  const ScalarField num = second_plus(u) * omega.minus + second_minus(u) * omega.plus;
  return num / (2.0 * (omega.plus * omega.minus));
}

ScalarField bundle_potential(const SplitForm& omega, double p, double q) {
  require_positive(omega, "bundle_flatness_residual");
  ScalarField phi = p * log(omega.plus) + q * log(omega.minus);
  const GridPtr& g = omega.grid();
  if (g->kind() == BackendKind::HopfCylinder) {
    const double al = g->spec().alpha, be = g->spec().beta;
    if (std::abs(p * al + q * be) > 1e-12 * (std::abs(p * al) + std::abs(q * be)))
      throw Error(ErrorKind::InvalidArgument,
                  "bundle potential: p*alpha + q*beta must vanish on a Hopf chart (weights not single-valued)");
    // p W+ + q W- with the s-dependence cancelled
    const double c = -p * std::log(al * al) - q * std::log(be * be);
    phi += ScalarField::sample(g, [=](std::span<const double> x) { return c - p * al * x[0]; });
  }
  return phi;
}

MixedResidual bundle_flatness_residual(const SplitForm& omega, double p, double q) {
  const ScalarField phi = bundle_potential(omega, p, q);
  MixedResidual r{second_plus(phi), second_minus(phi), mixed_cross(phi), 0.0};
  r.sup_norm = std::max({r.diag_plus.interior_sup_norm(), r.diag_minus.interior_sup_norm(), r.cross.re.interior_sup_norm(),
                         r.cross.im.interior_sup_norm()});
  return r;
}

}  // namespace splitma
