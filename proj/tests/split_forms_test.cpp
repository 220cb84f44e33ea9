#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "splitma/split_forms.hpp"

using namespace splitma;
using std::numbers::pi;

namespace {

GridPtr torus() { return Grid::make(GridSpec::torus({8, 8, 8, 8})); }

ScalarField along(const GridPtr& g, int axis, double amp = 1.0, double shift = 0.0) {
  return ScalarField::sample(g, [=](std::span<const double> c) { return shift + amp * std::cos(2 * pi * c[axis]); });
}

// sup over the grid of |1/4 d^2/dx^2 (amp cos 2 pi x)| by central differences
double quarter_fd2_sup(double amp, std::size_t n) {
  const double h = 1e-4;
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = double(i) / double(n);
    auto f = [amp](double y) { return amp * std::cos(2 * pi * y); };
    m = std::max(m, std::abs(0.25 * (f(x + h) - 2 * f(x) + f(x - h)) / (h * h)));
  }
  return m;
}

}  // namespace

TEST(Box, ConstantsAndSigns) {
  auto g = torus();
  auto c = box(ScalarField(g, 3.0));
  EXPECT_LT(form_scale(c), 1e-10);
  auto b1 = box(along(g, 0));
  EXPECT_LT((b1.plus - (-pi * pi) * along(g, 0)).sup_norm(), 1e-10);
  EXPECT_LT(b1.minus.sup_norm(), 1e-10);
  auto b3 = box(along(g, 2));
  EXPECT_LT(b3.plus.sup_norm(), 1e-10);
  EXPECT_LT((b3.minus - (pi * pi) * along(g, 2)).sup_norm(), 1e-10);
}

TEST(Box, ProjectedDdbarIsInvolutionOfBox) {
  auto g = torus();
  auto u = random_smooth_field(g, 11, 1.0);
  auto a = pi_ddbar(u), b = involution(box(u));
  EXPECT_EQ((a.plus - b.plus).sup_norm(), 0.0);
  EXPECT_EQ((a.minus - b.minus).sup_norm(), 0.0);
  auto c = pi_ddbar(along(g, 2));
  EXPECT_LT((c.minus - (-pi * pi) * along(g, 2)).sup_norm(), 1e-10);
}

TEST(Involution, Basics) {
  auto g = torus();
  auto i1 = involution(flat_torus_metric(g));
  EXPECT_EQ(i1.plus.min(), 1.0);
  EXPECT_EQ(i1.minus.max(), -1.0);
  SplitForm r{random_smooth_field(g, 1, 1.0), random_smooth_field(g, 2, 1.0)};
  auto rr = involution(involution(r));
  EXPECT_EQ((rr.plus - r.plus).sup_norm(), 0.0);
  EXPECT_EQ((rr.minus - r.minus).sup_norm(), 0.0);
}

TEST(Bracket, ClosedFormOnUnitTorus) {
  auto g = torus();
  for (double t : {-1.0, 0.3, 2.0}) {
    SplitForm eta = flat_torus_metric(g);
    SplitForm gamma{ScalarField(g, std::exp(t)), ScalarField(g, std::exp(-t))};
    auto v = bracket(eta, gamma);
    EXPECT_NEAR(v.value, -8.0 * std::sinh(t), 1e-12 * (1 + std::cosh(t)));
    EXPECT_GE(v.error, 0.0);
    EXPECT_NEAR(bracket(eta, eta).value, 0.0, 0.0);
  }
}

TEST(Bracket, AntisymmetricAndBilinear) {
  auto g = torus();
  SplitForm a{random_smooth_field(g, 1, 1.0), random_smooth_field(g, 2, 1.0)};
  SplitForm b{random_smooth_field(g, 3, 1.0), random_smooth_field(g, 4, 1.0)};
  SplitForm c{random_smooth_field(g, 5, 1.0), random_smooth_field(g, 6, 1.0)};
  EXPECT_EQ(bracket(a, b).value, -bracket(b, a).value);
  const double lhs = bracket(2.0 * a - 3.0 * c, b).value;
  EXPECT_NEAR(lhs, 2.0 * bracket(a, b).value - 3.0 * bracket(c, b).value, 1e-12);
}

TEST(Bracket, BoxImagesPairToZeroWithPluriclosed) {
  auto g = torus();
  SplitForm gamma{along(g, 0, 0.5, 1.0), along(g, 2, 0.5, 1.0)};
  ASSERT_LT(pluriclosed_residual(gamma), 1e-10);
  auto u = random_smooth_field(g, 9, 1.0);
  EXPECT_NEAR(bracket(box(u), gamma).value, 0.0, 1e-11);
}

TEST(Residuals, PinnedValues) {
  auto g = torus();
  EXPECT_LT(pluriclosed_residual(flat_torus_metric(g)), 1e-12);
  EXPECT_LT(boxclosed_residual(flat_torus_metric(g)), 1e-12);
  SplitForm w{along(g, 2, 0.5, 1.0), ScalarField(g, 1.0)};
  EXPECT_NEAR(pluriclosed_residual(w), quarter_fd2_sup(0.5, 8), 1e-5);
  EXPECT_NEAR(pluriclosed_residual(w), pi * pi / 2, 1e-10);
  SplitForm v{ScalarField(g, 1.0), along(g, 0, 0.5, 1.0)};
  EXPECT_NEAR(boxclosed_residual(v), quarter_fd2_sup(0.5, 8), 1e-5);
}

TEST(Positivity, Basics) {
  auto g = torus();
  EXPECT_TRUE(is_positive(flat_torus_metric(g), 0.0));
  EXPECT_FALSE(is_positive(SplitForm{ScalarField(g, 1.0), ScalarField(g, -1.0)}, 0.0));
  EXPECT_FALSE(is_positive(flat_torus_metric(g), 1.0));
  EXPECT_THROW(is_positive(flat_torus_metric(g), -1.0), Error);
}
