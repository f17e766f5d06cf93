#include "support/instances.hpp"

#include <sivo/errors.hpp>
#include <sivo/oracle.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace sivo;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

std::vector<Expr> exprs(std::initializer_list<const char*> texts) {
  std::vector<Expr> out;
  for (const char* t : texts) out.push_back(Expr::parse(t, 1));
  return out;
}

GridSpec line(double lo, double hi, int points, std::vector<Vector> extra = {}) {
  return GridSpec{vec({lo}), vec({hi}), {points}, std::move(extra)};
}

Problem scaled_family() {
  return Problem(1, exprs({"sqcosinv(x)", "0"}), {{"g", Expr::parse("t*x", 1, 1), IndexDomain::interval(1, 2)}},
                 OmegaSet::whole(1));
}

Problem shifted_family() {
  return Problem(1, exprs({"sqcosinv(x)", "sqcosinv(x)"}),
                 {{"g", Expr::parse("x - t", 1, 1), IndexDomain::interval(0, 1)}}, OmegaSet::whole(1));
}

Problem convex_pair() { return Problem(1, exprs({"x^2", "(x - 1)^2"}), {}, OmegaSet::box(vec({0}), vec({1}))); }

const Vector kXi = vec({0.1, 0.1});
const Vector kZero = vec({0.0});
const double kInvPi = 1.0 / std::numbers::pi;

}  // namespace

TEST(Classify, ShiftedFamilyQuasiWeakViolated) {
  const Problem P = shifted_family();
  const FeasibleGrid grid = FeasibleGrid::build(P, line(-2, 0, 10001, {vec({-kInvPi})}));
  const ClassificationReport r = classify_point(P, kZero, kXi, grid);
  const NotionVerdict& v = r.get(Notion::XiQuasiWeakPareto);
  ASSERT_FALSE(v.holds);
  EXPECT_TRUE(v.reverified);
  EXPECT_NEAR(v.witness[0], -0.3912, 5e-3);
  EXPECT_LE(v.shifted_difference.maxCoeff(), -0.069 + 1e-3);
  // the explicit point attains the closed form value
  const double expected = kInvPi * (0.1 - kInvPi);
  EXPECT_NEAR(scalarize_phi(P, kZero, kXi, vec({-kInvPi})), expected, 1e-12);
}

TEST(Classify, ScaledFamilyQuasiWeakHolds) {
  const Problem P = scaled_family();
  const FeasibleGrid grid = FeasibleGrid::build(P, line(-2, 0, 10001));
  EXPECT_GE(grid.size(), 10000u);
  EXPECT_TRUE(classify_point(P, kZero, kXi, grid).get(Notion::XiQuasiWeakPareto).holds);
}

TEST(Classify, ExactParetoAtMinimizerOfFirstObjective) {
  const Problem P = convex_pair();
  const FeasibleGrid grid = FeasibleGrid::build(P, line(0, 1, 101));
  const ClassificationReport r = classify_point(P, kZero, vec({0.0, 0.0}), grid);
  EXPECT_TRUE(r.get(Notion::Pareto).holds);
  EXPECT_TRUE(r.get(Notion::WeakPareto).holds);
}

TEST(Classify, EmptyGridIsAnError) {
  const Problem P = convex_pair();
  const FeasibleGrid grid = FeasibleGrid::build(P, line(2, 3, 11));
  EXPECT_TRUE(grid.empty());
  EXPECT_THROW(classify_point(P, vec({0.5}), kXi, grid), Error);
}

TEST(Classify, DefinitionChainAndScalarizations) {
  std::mt19937_64 rng(51);
  for (int k = 0; k < 10; ++k) {
    const sivo::testing::ConvexInstance inst = sivo::testing::random_convex_instance(rng, 1 + k % 2, 2 + k % 2);
    const FeasibleGrid grid = FeasibleGrid::build(inst.problem, inst.grid);
    ASSERT_FALSE(grid.empty());
    std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
    for (int j = 0; j < 5; ++j) {
      const Vector xbar = grid.points()[pick(rng)];
      const ClassificationReport r = classify_point(inst.problem, xbar, inst.xi, grid);
      EXPECT_TRUE(!r.get(Notion::XiPareto).holds || r.get(Notion::XiWeakPareto).holds);
      EXPECT_TRUE(!r.get(Notion::Pareto).holds || r.get(Notion::WeakPareto).holds);
      EXPECT_TRUE(!r.get(Notion::XiQuasiPareto).holds || r.get(Notion::XiQuasiWeakPareto).holds);

      double psi_min = INFINITY, phi_min = INFINITY;
      for (const auto& x : grid.points()) {
        psi_min = std::min(psi_min, scalarize_psi(inst.problem, xbar, inst.xi, x));
        phi_min = std::min(phi_min, scalarize_phi(inst.problem, xbar, inst.xi, x));
      }
      EXPECT_EQ(psi_min >= 0.0, r.get(Notion::XiWeakPareto).holds);
      EXPECT_EQ(phi_min >= 0.0, r.get(Notion::XiQuasiWeakPareto).holds);

      const ClassificationReport exact = classify_point(inst.problem, xbar, Vector::Zero(inst.problem.m()), grid);
      EXPECT_EQ(exact.get(Notion::XiQuasiPareto).holds, exact.get(Notion::Pareto).holds);
      EXPECT_EQ(exact.get(Notion::XiQuasiWeakPareto).holds, exact.get(Notion::WeakPareto).holds);
    }
  }
}

TEST(Scalarize, IdentitiesAtAnchor) {
  const Problem P = shifted_family();
  EXPECT_DOUBLE_EQ(scalarize_psi(P, kZero, vec({0.1, 0.3}), kZero), 0.3);
  EXPECT_EQ(scalarize_phi(P, kZero, vec({0.1, 0.3}), kZero), 0.0);
}

TEST(BoundedSection, NonnegativeObjectives) {
  const Problem P = convex_pair();
  const SectionResult s = bounded_section(P, P.objective_values(vec({0.5})), line(0, 1, 101));
  EXPECT_TRUE(s.bounded);
  // the section is the single value f(0.5); its infimum is a valid lower bound a >= 0
  EXPECT_NEAR(s.bound[0], 0.25, 1e-12);
  EXPECT_NEAR(s.bound[1], 0.25, 1e-12);
  EXPECT_GE(s.bound.minCoeff(), 0.0);
}

TEST(BoundedSection, LinearObjectiveOnWholeLineIsUnbounded) {
  const Problem P(1, exprs({"x", "x"}), {}, OmegaSet::whole(1));
  const SectionResult s = bounded_section(P, vec({0.0, 0.0}), line(-1, 1, 41));
  EXPECT_FALSE(s.bounded);
  EXPECT_EQ(s.scales.size(), 4u);
}

TEST(BoundedSection, ScaledFamilyIsBounded) {
  const Problem P = scaled_family();
  const SectionResult s = bounded_section(P, vec({0.0, 0.0}), line(-2, 0, 401));
  EXPECT_TRUE(s.bounded);
  EXPECT_EQ(s.bound[1], 0.0);
}

TEST(FindXiPareto, PassesOracleTest) {
  const Problem P = convex_pair();
  const FeasibleGrid grid = FeasibleGrid::build(P, line(0, 1, 201));
  const GridPoint g = find_xi_pareto(P, vec({0.05, 0.05}), grid);
  EXPECT_TRUE(classify_point(P, g.x, vec({0.05, 0.05}), grid).get(Notion::XiPareto).holds);
}

TEST(FindXiPareto, SingleObjectiveBand) {
  const Problem P(1, exprs({"x"}), {}, OmegaSet::box(vec({0}), vec({1})));
  const FeasibleGrid grid = FeasibleGrid::build(P, line(0, 1, 101));
  const GridPoint g = find_xi_pareto(P, vec({0.1}), grid);
  EXPECT_GE(g.x[0], 0.0);
  EXPECT_LE(g.x[0], 0.1 + 1e-12);
}

TEST(FindXiPareto, HugeShiftReturnsFirstPoint) {
  const Problem P = convex_pair();
  const FeasibleGrid grid = FeasibleGrid::build(P, line(0, 1, 51));
  EXPECT_EQ(find_xi_pareto(P, vec({10.0, 10.0}), grid).index, 0u);
}

TEST(Ekeland, ConvexPairFromRightEnd) {
  const Problem P = convex_pair();
  const FeasibleGrid grid = FeasibleGrid::build(P, line(0, 1, 201));
  const EkelandResult e = ekeland_quasi(P, kXi, vec({1.0}), grid);
  EXPECT_LE(e.iterations, grid.size());
  EXPECT_EQ(e.path.front()[0], 1.0);
  EXPECT_TRUE(classify_point(P, e.x, kXi, grid).get(Notion::XiQuasiPareto).holds);
}

TEST(Ekeland, FixedPointStays) {
  const Problem P = convex_pair();
  const FeasibleGrid grid = FeasibleGrid::build(P, line(0, 1, 201));
  const EkelandResult first = ekeland_quasi(P, kXi, vec({1.0}), grid);
  const EkelandResult again = ekeland_quasi(P, kXi, first.x, grid);
  EXPECT_EQ(again.iterations, 0u);
  EXPECT_EQ(again.x, first.x);
}

TEST(Ekeland, ShiftedFamilyLeavesOrigin) {
  const Problem P = shifted_family();
  const FeasibleGrid grid = FeasibleGrid::build(P, line(-2, 0, 2001));
  const EkelandResult e = ekeland_quasi(P, kXi, kZero, grid);
  EXPECT_GT(e.iterations, 0u);
  EXPECT_NE(e.x[0], 0.0);
  EXPECT_TRUE(classify_point(P, e.x, kXi, grid).get(Notion::XiQuasiPareto).holds);
}

TEST(Ekeland, RejectsNonpositiveXi) {
  const Problem P = convex_pair();
  const FeasibleGrid grid = FeasibleGrid::build(P, line(0, 1, 11));
  EXPECT_THROW(ekeland_quasi(P, vec({0.1, 0.0}), vec({1.0}), grid), Error);
}

TEST(ShiftedFront, FindXiParetoIsOnTheFront) {
  const Problem P = convex_pair();
  const FeasibleGrid grid = FeasibleGrid::build(P, line(0, 1, 101));
  const auto front = shifted_front(kXi, grid);
  ASSERT_FALSE(front.empty());
  EXPECT_EQ(find_xi_pareto(P, kXi, grid).index, front.front());
}
