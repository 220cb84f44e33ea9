#include "splitma/split_forms.hpp"

#include <algorithm>
#include <cmath>

namespace splitma {

SplitForm box(const ScalarField& u) { return {second_plus(u), -second_minus(u)}; }

SplitForm pi_ddbar(const ScalarField& u) { return {second_plus(u), second_minus(u)}; }

SplitForm involution(const SplitForm& eta) { return {eta.plus, -eta.minus}; }

double hopf_tail(const ScalarField& v) {
  const Grid& g = *v.grid();
  if (g.kind() != BackendKind::HopfCylinder) return 0.0;
  const std::size_t nx = g.extent(0), ns = g.extent(1);
  double left = 0.0, right = 0.0;
  for (std::size_t j = 0; j < ns; ++j) {
    left += v[j];
    right += v[(nx - 1) * ns + j];
  }
  const double period = g.spec().axes[1].hi - g.spec().axes[1].lo;
  left *= period / double(ns);
  right *= period / double(ns);
  return g.density_factor() * (left / g.spec().alpha + right / g.spec().beta);
}

BracketValue bracket(const SplitForm& eta, const SplitForm& gamma) {
  require_same_grid(eta.plus, gamma.plus);
  const ScalarField integrand = eta.plus * gamma.minus - eta.minus * gamma.plus;
  const double full = integrate(integrand);
  const double tail = hopf_tail(integrand);
  return {full + tail, std::abs(full - integrate_coarse(integrand))};
}

double pluriclosed_residual(const SplitForm& omega) {
  return (second_minus(omega.plus) + second_plus(omega.minus)).interior_sup_norm();
}

double boxclosed_residual(const SplitForm& omega) {
  return (second_plus(omega.minus) - second_minus(omega.plus)).interior_sup_norm();
}

bool is_positive(const SplitForm& omega, double floor) {
  if (floor < 0.0) throw Error(ErrorKind::InvalidArgument, "is_positive: floor must be >= 0");
  return omega.plus.min() > floor && omega.minus.min() > floor;
}

double form_scale(const SplitForm& omega) { return std::max(omega.plus.sup_norm(), omega.minus.sup_norm()); }

}  // namespace splitma
