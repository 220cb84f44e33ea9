#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "splitma/curvature.hpp"
#include "splitma/hopf.hpp"
#include "splitma/tma.hpp"

using namespace splitma;
using std::numbers::pi;

namespace {

// x as a function of k: integral of dk / (k(1-k)((beta-alpha)k + alpha)) from 1/2.
double inverse_profile(double alpha, double beta, double k, double one_minus_k) {
  auto G = [&](double kk, double km) {
    double v = std::log(kk) / alpha - std::log(km) / beta;
    if (alpha != beta) v -= (beta - alpha) / (alpha * beta) * std::log(std::abs((beta - alpha) * kk + alpha));
    return v;
  };
  return G(k, one_minus_k) - G(0.5, 0.5);
}

KProfile profile(double a, double b, std::size_t nx = 1025, std::size_t ns = 8, double X = 0.0) {
  return k_profile(a, b, Grid::make(GridSpec::hopf(a, b, nx, ns, X)));
}

}  // namespace

TEST(KProfile, LogisticWhenRatesAgree) {
  for (double a : {1.0, 2.5}) {
    auto p = profile(a, a, 257);
    for (double x : {-7.3, -1.0, 0.0, 0.37, 4.0, 11.0}) {
      EXPECT_NEAR(p.k(x), 1.0 / (1.0 + std::exp(-a * x)), 1e-10);
      EXPECT_NEAR(p.k(x) / (1.0 / (1.0 + std::exp(-a * x))), 1.0, 1e-10);
    }
  }
}

TEST(KProfile, MatchesImplicitClosedForm) {
  auto p = profile(1.0, 2.0);
  for (double x = -10.0; x <= 10.0; x += 0.731) EXPECT_NEAR(inverse_profile(1.0, 2.0, p.k(x), p.one_minus_k(x)), x, 1e-9);
  auto q = profile(0.5, 3.0, 257);
  for (double x : {-15.0, -2.0, 0.1, 3.0}) EXPECT_NEAR(inverse_profile(0.5, 3.0, q.k(x), q.one_minus_k(x)), x, 1e-9);
}

TEST(KProfile, InitialValueSlopeAndLimits) {
  auto p = profile(1.0, 2.0);
  EXPECT_EQ(p.k(0.0), 0.5);
  EXPECT_NEAR(p.dk(0.0), 3.0 / 8.0, 1e-15);
  const double X = GridSpec::default_hopf_half_width(1.0, 2.0);
  EXPECT_LT(p.one_minus_k(X), 1e-6);
  // left tail decays only like e^{alpha x}: k(-10) is about 2.6e-5
  EXPECT_NEAR(inverse_profile(1.0, 2.0, p.k(-X), p.one_minus_k(-X)), -X, 1e-9);
  EXPECT_GT(p.k(-X), 1e-6);
}

TEST(KProfile, MonotoneBoundedAndOdeResidual) {
  auto p = profile(1.0, 2.0);
  auto k = p.sample();
  const auto& g = *p.grid();
  for (std::size_t i = 0; i + 1 < g.extent(0); ++i) {
    const double a = k[i * g.extent(1)], b = k[(i + 1) * g.extent(1)];
    EXPECT_LT(a, b);
    EXPECT_GT(a, 0.0);
    EXPECT_LT(b, 1.0);
  }
  EXPECT_LT(p.ode_residual(), 1e-10);
}

TEST(KProfile, RejectsBadInput) {
  auto g = Grid::make(GridSpec::hopf(1.0, 2.0, 65, 8));
  EXPECT_THROW(k_profile(1.0, 1.0, g), Error);
  EXPECT_THROW(k_profile(-1.0, 2.0, g), Error);
  EXPECT_THROW(k_profile(1.0, 1.0, Grid::make(GridSpec::inoue(9, 1, 2))), Error);
}

TEST(SuMetric, BasicProperties) {
  auto p = profile(1.0, 2.0);
  auto w = su_metric(p, 0.0);
  const std::size_t mid = (p.grid()->extent(0) / 2) * p.grid()->extent(1);
  EXPECT_EQ(w.plus[mid], 0.5);
  EXPECT_EQ(w.minus[mid], 0.5);
  EXPECT_TRUE(is_positive(w));
  EXPECT_LT(pluriclosed_residual(w), 1e-8);
  auto wp = su_prime(p, 0.0);
  EXPECT_NEAR(wp.plus[mid], 3.0 / 8.0, 1e-15);
  EXPECT_TRUE(is_positive(involution(wp)));
  EXPECT_LT(pluriclosed_residual(wp), 1e-8);
}

TEST(SuMetric, PrimeIsTimeDerivative) {
  auto p = profile(1.0, 2.0, 257);
  const double t = 0.3;
  double prev = 0.0;
  for (double d : {1e-2, 5e-3}) {
    auto fd = (0.5 / d) * (su_metric(p, t + d) - su_metric(p, t - d));
    const double err = form_scale(fd - su_prime(p, t));
    if (prev > 0.0) EXPECT_NEAR(prev / err, 4.0, 0.2);
    prev = err;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(Soliton, Identity) {
  EXPECT_LT(soliton_residual(profile(1.0, 1.0, 2049), 0.0), 1e-7);
  auto p = profile(1.0, 2.0, 2049);
  const double r0 = soliton_residual(p, 0.0);
  EXPECT_LT(r0, 1e-6);
  EXPECT_LT(std::abs(soliton_residual(p, 0.7) - r0), 1e-6);
  // the opposite sign is far off
  auto w = su_metric(p, 0.0);
  EXPECT_GT(interior_form_norm(bismut_ricci(w) - (2.0 - 1.0) * su_prime(p, 0.0)), 0.5);
}

TEST(HopfBrackets, ShiftConstants) {
  auto p = profile(1.0, 2.0, 1024, 32, 12.0);
  auto res = hopf_bracket_constants(p, {-1.0, 0.0, 0.5, 1.0, 2.0});
  EXPECT_NEAR(res.c, 4 * pi * pi, 1e-12);
  for (const auto& ch : res.checks) {
    if (ch.t == 0.0) {
      EXPECT_NEAR(ch.with_base, 0.0, 1e-12);
    } else {
      EXPECT_LT(ch.rel_err_base, 1e-4) << ch.t;
    }
    EXPECT_LT(ch.rel_err_prime, 1e-4) << ch.t;
    EXPECT_NEAR(ch.prime_second, -res.c, 1e-4 * res.c);
  }
  // slope of the affine map t -> {omega_t, omega}
  EXPECT_NEAR((res.checks[4].with_base - res.checks[0].with_base) / 3.0, res.c, 1e-4 * res.c);
}

TEST(HopfBrackets, FlatnessOracleOnSuMetric) {
  auto p = profile(1.0, 2.0, 513);
  auto r = bundle_flatness_residual(su_metric(p, 0.0), 2.0, -1.0);
  const auto& g = *p.grid();
  auto phi = [&](double x) { return 2.0 * std::log(p.k(x)) - std::log(p.one_minus_k(x)) - 2.0 * x; };
  double oracle = 0.0;
  const double hh = 1e-3;
  for (std::size_t i = 3; i + 3 < g.extent(0); ++i) {
    const double x = g.coordinate(0, i);
    oracle = std::max(oracle, std::abs((phi(x + hh) - 2 * phi(x) + phi(x - hh)) / (hh * hh)));
  }
  EXPECT_GT(oracle, 0.1);
  EXPECT_NEAR(r.sup_norm, oracle, 1e-4 * oracle);
}

TEST(ProjectToSu, Examples) {
  auto p = profile(1.0, 2.0, 513, 8);
  auto a = project_to_su(su_metric(p, 0.6), p);
  EXPECT_NEAR(a.s, 1.0, 1e-9);
  EXPECT_NEAR(a.t, 0.6, 1e-9);
  EXPECT_LT(a.residual, 1e-8);

  auto v = ScalarField::sample(p.grid(), [](std::span<const double> c) { return 0.05 * std::exp(-c[0] * c[0]) * std::cos(pi * c[1]); });
  auto b = project_to_su(2.0 * su_metric(p, 0.0) + box(v), p);
  EXPECT_NEAR(b.s, 2.0, 1e-8);
  EXPECT_NEAR(b.t, 0.0, 1e-8);
  EXPECT_LT(b.residual, 1e-5);

  auto again = project_to_su(b.s * su_metric(p, b.t), p);
  EXPECT_NEAR(again.s, b.s, 1e-10);
  EXPECT_NEAR(again.t, b.t, 1e-10);

  try {
    project_to_su(-1.0 * su_metric(p, 0.0), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotInCone);
  }
  try {
    project_to_su(involution(su_prime(p, 0.0)), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotPluriclosed);
  }
}

TEST(HopfFlatten, SuBaseBecomesFlat) {
  auto p = profile(1.0, 2.0, 129, 8, 6.0);
  auto rep = flatten_bundle(su_metric(p, 0.0), 2.0, -1.0);
  auto pr = flatten_problem(su_metric(p, 0.0), 2.0, -1.0);
  EXPECT_LT(bundle_flatness_residual(deformed_metric(pr, rep.u), 2.0, -1.0).sup_norm, 1e-6);
  EXPECT_TRUE(is_positive(deformed_metric(pr, rep.u)));
}
