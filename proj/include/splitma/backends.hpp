#pragma once

// Split forms f+ Theta+ + f- Theta- and the per-backend fixtures.
//
// Reference frames:
//   Torus4D       Theta+ = i dz^dzbar,                Theta- = i dw^dwbar
//   HopfCylinder  Theta+ = i dz^dzbar/(alpha^2|z|^2), Theta- = i dw^dwbar/(beta^2|w|^2)
//   InoueStrip    Theta+ = i dz^dzbar,                Theta- = i dw^dwbar

#include <utility>

#include "splitma/grid.hpp"

namespace splitma {

struct SplitForm {
  ScalarField plus;
  ScalarField minus;

  SplitForm() = default;
  SplitForm(ScalarField p, ScalarField m);

  const GridPtr& grid() const noexcept { return plus.grid(); }

  SplitForm& operator+=(const SplitForm& o);
  SplitForm& operator-=(const SplitForm& o);
  SplitForm& operator*=(double s);
};

SplitForm operator+(SplitForm a, const SplitForm& b);
SplitForm operator-(SplitForm a, const SplitForm& b);
SplitForm operator*(double s, SplitForm a);
/// Pointwise conformal rescaling e^f * omega.
SplitForm conformal(const ScalarField& f, const SplitForm& omega);

/// Components (1, 1) on a Torus4D grid.
SplitForm flat_torus_metric(const GridPtr& grid);

/// a i dz^dzbar / y^2 + b y i dw^dwbar on an InoueStrip grid.
SplitForm tricerri_metric(const GridPtr& grid, double a, double b);

/// (W+, W-): log-density of Theta+- against i dz^dzbar, i dw^dwbar.
/// Hopf: W+ = -log alpha^2 - alpha mu, W- = -log beta^2 - beta nu (sampled; not s-periodic).
std::pair<ScalarField, ScalarField> weight_potentials(const GridPtr& grid);

}  // namespace splitma
