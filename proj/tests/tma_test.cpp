#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "splitma/curvature.hpp"
#include "splitma/tma.hpp"

using namespace splitma;
using std::numbers::pi;

namespace {

GridPtr torus(std::size_t n = 8) { return Grid::make(GridSpec::torus({n, n, n, n})); }

ScalarField mms_u(const GridPtr& g) {
  return ScalarField::sample(g, [](std::span<const double> c) { return 0.05 * std::cos(2 * pi * c[0]) * std::cos(2 * pi * c[2]); });
}

TmaProblem mms_problem(const GridPtr& g, double beta) {
  TmaProblem pr{flat_torus_metric(g), ScalarField(g, 0.0), beta, 1.0, 1, -1};
  const ScalarField u = mms_u(g);
  pr.F = beta * log(tma_lambda(pr, u)) - log(tma_eta(pr, u));
  return pr;
}

ScalarField shifted(ScalarField u) {
  u += -u.min();
  return u;
}

const EstimateCheck* find(const std::vector<EstimateCheck>& v, const std::string& n) {
  for (const auto& c : v)
    if (c.name == n) return &c;
  return nullptr;
}

}  // namespace

TEST(Tma, EllipticityGuard) {
  auto g = torus();
  TmaProblem pr{flat_torus_metric(g), ScalarField(g, 0.0), 0.5, 1.0, 1, 1};
  try {
    solve_nonlinear(pr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Ellipticity);
  }
  pr.sigma_minus = -1;
  pr.p = -0.5;
  EXPECT_THROW(solve_nonlinear(pr), Error);
}

TEST(Tma, ZeroDataGivesTrivialSolution) {
  auto g = torus();
  for (auto [p, q, sp, sm] : {std::tuple{0.5, 1.0, 1, -1}, std::tuple{1.0, -2.0, 1, 1}, std::tuple{2.0, 1.0, 1, -1}}) {
    auto rep = solve_nonlinear({flat_torus_metric(g), ScalarField(g, 0.0), p, q, sp, sm});
    EXPECT_EQ(rep.u.sup_norm(), 0.0);
    EXPECT_EQ(rep.xi, 0.0);
  }
  auto lin = solve_linear(flat_torus_metric(g), ScalarField(g, 0.0));
  EXPECT_EQ(lin.u.sup_norm(), 0.0);
  EXPECT_EQ(lin.xi, 0.0);
}

TEST(Tma, ConstantDataAbsorbedByXi) {
  auto g = torus();
  auto lin = solve_linear(flat_torus_metric(g), ScalarField(g, 0.7));
  EXPECT_EQ(lin.u.sup_norm(), 0.0);
  EXPECT_NEAR(lin.xi, -0.7, 1e-14);
  auto dual = solve_nonlinear({flat_torus_metric(g), ScalarField(g, 0.7), 1.0, -2.0, 1, 1});
  EXPECT_LT(dual.u.sup_norm(), 1e-12);
  EXPECT_NEAR(dual.xi, -0.7, 1e-12);
  EXPECT_LT(dual.final_residual, 1e-11);
}

TEST(Tma, ManufacturedLinear) {
  auto g = torus();
  auto pr = mms_problem(g, 1.0);
  auto rep = solve_linear(pr.base, pr.F);
  EXPECT_LT((rep.u - shifted(mms_u(g))).sup_norm(), 1e-8);
  EXPECT_LT(std::abs(rep.xi), 1e-8);
  EXPECT_LT(rep.final_residual, 1e-8);
}

TEST(Tma, ManufacturedNonlinear) {
  auto g = torus();
  auto pr = mms_problem(g, 0.5);
  auto rep = solve_nonlinear(pr);
  EXPECT_LT((rep.u - shifted(mms_u(g))).sup_norm(), 1e-7);
  EXPECT_LT(std::abs(rep.xi), 1e-8);
  EXPECT_LE(rep.final_residual, 1e-10);
  EXPECT_EQ(rep.path.size(), 10u);
  EXPECT_NEAR(rep.u.min(), 0.0, 0.0);
  for (const auto& st : rep.path) {
    EXPECT_GT(st.min_lambda, 0.0);
    EXPECT_GT(st.min_eta, 0.0);
  }
  for (const auto& c : rep.checks) EXPECT_TRUE(c.passed) << c.name;
}

TEST(Tma, LinearAndNewtonAgree) {
  auto g = torus();
  auto F = random_smooth_field(g, 21, 0.5);
  auto a = solve_linear(flat_torus_metric(g), F);
  auto b = solve_nonlinear({flat_torus_metric(g), F, 1.0, 1.0, 1, -1});
  EXPECT_LT((a.u - b.u).sup_norm(), 1e-8);
  EXPECT_LT(std::abs(a.xi - b.xi), 1e-9);
}

TEST(Tma, UniquenessAndGaugeProbe) {
  auto g = torus();
  TmaProblem pr{flat_torus_metric(g), random_smooth_field(g, 30, 0.5), 0.5, 1.0, 1, -1};
  auto ref = solve_nonlinear(pr);
  for (unsigned seed : {1u, 2u}) {
    TmaOptions o;
    o.initial = random_smooth_field(g, seed, 0.005);
    auto other = solve_nonlinear(pr, o);
    EXPECT_LT((other.u - ref.u).sup_norm(), 1e-8);
    EXPECT_LT(std::abs(other.xi - ref.xi), 1e-8);
    ScalarField init = *o.initial;
    init += 5.0;
    o.initial = init;
    auto shifted_run = solve_nonlinear(pr, o);
    EXPECT_LT((shifted_run.u - other.u).sup_norm(), 1e-12);
    EXPECT_NEAR(shifted_run.xi, other.xi, 1e-14);
  }
}

TEST(Estimates, TrivialSolution) {
  auto g = torus();
  TmaProblem pr{flat_torus_metric(g), ScalarField(g, 0.0), 0.5, 1.0, 1, -1};
  auto rep = solve_nonlinear(pr);
  auto checks = estimates_report(pr, rep);
  ASSERT_FALSE(checks.empty());
  for (const auto& c : checks) EXPECT_TRUE(c.passed) << c.name;
  EXPECT_NEAR(find(checks, "laplacian_lower_bound")->slack, 0.5, 1e-14);
  EXPECT_TRUE(estimates_report({flat_torus_metric(g), ScalarField(g, 0.0), 1.0, 1.0, 1, -1}, rep).empty());
}

TEST(Estimates, RandomDataRespectBounds) {
  auto g = torus();
  for (unsigned seed = 0; seed < 3; ++seed) {
    TmaProblem pr{flat_torus_metric(g), random_smooth_field(g, 50 + seed, 0.5), 0.5, 1.0, 1, -1};
    auto rep = solve_nonlinear(pr);
    EXPECT_LE(std::abs(rep.xi), pr.F.sup_norm() + 1e-8);
    for (const auto& c : rep.checks) EXPECT_TRUE(c.passed) << c.name << " seed " << seed;
  }
}

TEST(Estimates, CorruptedSolutionFailsIdentity) {
  auto g = torus();
  TmaProblem pr{flat_torus_metric(g), random_smooth_field(g, 60, 0.5), 0.5, 1.0, 1, -1};
  auto rep = solve_nonlinear(pr);
  rep.u += 0.01 * ScalarField::sample(g, [](std::span<const double> c) { return std::cos(2 * pi * c[0]); });
  auto lu = find(estimates_report(pr, rep), "lu_identity");
  ASSERT_NE(lu, nullptr);
  EXPECT_FALSE(lu->passed);
  EXPECT_GT(lu->measured, 1e-4);
}

TEST(Prescribe, RicciTarget) {
  auto g = torus();
  auto w = flat_torus_metric(g);
  auto zero = prescribe_bismut_ricci(w, ScalarField(g, 0.0));
  EXPECT_EQ(zero.u.sup_norm(), 0.0);
  auto cst = prescribe_bismut_ricci(w, ScalarField(g, 2.0));
  EXPECT_EQ(cst.u.sup_norm(), 0.0);
  auto G = ScalarField::sample(g, [](std::span<const double> c) { return 0.1 * std::cos(2 * pi * c[0]); });
  auto rep = prescribe_bismut_ricci(w, G);
  const TmaProblem pr{w, -1.0 * G, 1.0, 1.0, 1, -1};
  auto ric = bismut_ricci(deformed_metric(pr, rep.u));
  EXPECT_LT(form_scale(ric - box(G)), 1e-7);
}

TEST(Flatten, TricerriAlreadyFlat) {
  auto g = Grid::make(GridSpec::inoue(33, 1.0, 3.0));
  for (auto [a, b] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}}) {
    auto rep = flatten_bundle(tricerri_metric(g, a, b), 1.0, 2.0);
    EXPECT_LT(rep.u.sup_norm(), 1e-12);
    EXPECT_NEAR(rep.xi, std::log(a * b * b), 1e-10);
  }
}

TEST(Flatten, InoueDeformedBaseIsFlattened) {
  auto g = Grid::make(GridSpec::inoue(65, 1.0, 3.0));
  auto base = tricerri_metric(g, 1.0, 1.0);
  base.plus = base.plus * ScalarField::sample(g, [](std::span<const double> c) { return 1.0 + 0.2 * std::cos(pi * (c[0] - 1.0)); });
  auto rep = flatten_bundle(base, 1.0, 2.0);
  auto pr = flatten_problem(base, 1.0, 2.0);
  EXPECT_LT(bundle_flatness_residual(deformed_metric(pr, rep.u), 1.0, 2.0).sup_norm, 1e-8);
  EXPECT_TRUE(is_positive(deformed_metric(pr, rep.u)));
}

TEST(Flatten, RejectsMultivaluedHopfWeights) {
  auto g = Grid::make(GridSpec::hopf(1.0, 2.0, 65, 8));
  SplitForm w{ScalarField(g, 0.5), ScalarField(g, 0.5)};
  EXPECT_THROW(flatten_bundle(w, 1.0, 1.0), Error);
}
