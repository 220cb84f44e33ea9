#include "splitma/backends.hpp"

#include <cmath>

namespace splitma {

SplitForm::SplitForm(ScalarField p, ScalarField m) : plus(std::move(p)), minus(std::move(m)) {
  require_same_grid(plus, minus);
}

SplitForm& SplitForm::operator+=(const SplitForm& o) {
  plus += o.plus;
  minus += o.minus;
  return *this;
}

SplitForm& SplitForm::operator-=(const SplitForm& o) {
  plus -= o.plus;
  minus -= o.minus;
  return *this;
}

SplitForm& SplitForm::operator*=(double s) {
  plus *= s;
  minus *= s;
  return *this;
}

SplitForm operator+(SplitForm a, const SplitForm& b) { return a += b; }
SplitForm operator-(SplitForm a, const SplitForm& b) { return a -= b; }
SplitForm operator*(double s, SplitForm a) { return a *= s; }

SplitForm conformal(const ScalarField& f, const SplitForm& omega) {
  const ScalarField e = exp(f);
  return {e * omega.plus, e * omega.minus};
}

SplitForm flat_torus_metric(const GridPtr& grid) {
  if (grid->kind() != BackendKind::Torus4D) throw Error(ErrorKind::UnsupportedBackend, "flat_torus_metric: needs a Torus4D grid");
  return {ScalarField(grid, 1.0), ScalarField(grid, 1.0)};
}

SplitForm tricerri_metric(const GridPtr& grid, double a, double b) {
  if (grid->kind() != BackendKind::InoueStrip) throw Error(ErrorKind::UnsupportedBackend, "tricerri_metric: needs an InoueStrip grid");
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorKind::InvalidArgument, "tricerri_metric: a and b must be positive");
  return {ScalarField::sample(grid, [a](std::span<const double> c) { return a / (c[0] * c[0]); }),
          ScalarField::sample(grid, [b](std::span<const double> c) { return b * c[0]; })};
}

std::pair<ScalarField, ScalarField> weight_potentials(const GridPtr& grid) {
  if (grid->kind() != BackendKind::HopfCylinder) return {ScalarField(grid, 0.0), ScalarField(grid, 0.0)};
  const double al = grid->spec().alpha, be = grid->spec().beta;
  auto wp = ScalarField::sample(grid, [al](std::span<const double> c) { return -std::log(al * al) - al * (c[1] + 0.5 * c[0]); });
  auto wm = ScalarField::sample(grid, [be](std::span<const double> c) { return -std::log(be * be) - be * (c[1] - 0.5 * c[0]); });
  return {std::move(wp), std::move(wm)};
}

}  // namespace splitma
