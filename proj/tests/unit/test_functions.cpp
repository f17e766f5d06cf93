#include "support/oracles.hpp"

#include <sivo/errors.hpp>
#include <sivo/expr.hpp>

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

std::vector<double> sorted_scalars(const SubdiffSet& s) {
  std::vector<double> out;
  for (const auto& g : s.generators()) out.push_back(g[0]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Eval, SqcosinvIsZeroAtOrigin) {
  EXPECT_EQ(Expr::parse("sqcosinv(x)", 1).eval(vec({0.0})), 0.0);
}

TEST(Eval, AffineInParameter) {
  EXPECT_DOUBLE_EQ(Expr::parse("t*x", 1, 1).eval(vec({-1.0}), vec({2.0})), -2.0);
}

TEST(Eval, MaxWithZero) {
  EXPECT_EQ(Expr::parse("max(x1, 0)", 1).eval(vec({-3.0})), 0.0);
}

TEST(Eval, SqcosinvAwayFromOrigin) {
  const double x = -1.0 / std::numbers::pi;
  EXPECT_NEAR(Expr::parse("sqcosinv(x)", 1).eval(vec({x})), -1.0 / (std::numbers::pi * std::numbers::pi), 1e-15);
}

TEST(Eval, DomainErrors) {
  EXPECT_THROW(Expr::parse("log(x)", 1).eval(vec({0.0})), DomainError);
  EXPECT_THROW(Expr::parse("1/x", 1).eval(vec({0.0})), DomainError);
  EXPECT_THROW(Expr::parse("sqrt(x)", 1).eval(vec({-1.0})), DomainError);
}

TEST(Parse, RejectsUnsupportedCompositions) {
  EXPECT_THROW(Expr::parse("1/max(x, 1)", 1), ParseError);
  EXPECT_THROW(Expr::parse("max(x, 0)*max(x, 1)", 1), ParseError);
  EXPECT_THROW(Expr::parse("x*abs(x)", 1), ParseError);
  EXPECT_THROW(Expr::parse("max(abs(x), 1)", 1), ParseError);
  EXPECT_THROW(Expr::parse("x3", 2), ParseError);
  EXPECT_THROW(Expr::parse("t", 1), ParseError);
  EXPECT_THROW(Expr::parse("foo(x)", 1), ParseError);
  EXPECT_THROW(Expr::parse("(x", 1), ParseError);
}

TEST(Parse, AcceptsLinearCombinationsOfNonsmoothTerms) {
  const Expr e = Expr::parse("2*abs(x) - 3*max(x, 0) + t*sqcosinv(x)", 1, 1);
  EXPECT_FALSE(e.is_smooth());
  EXPECT_TRUE(e.depends_on_x());
  EXPECT_DOUBLE_EQ(e.eval(vec({-1.0}), vec({0.0})), 2.0);
}

TEST(Parse, ConstantsDoNotDependOnX) {
  EXPECT_FALSE(Expr::parse("-1/pi + 2^3", 1).depends_on_x());
  EXPECT_NEAR(Expr::parse("-1/pi", 1).eval(vec({5.0})), -1.0 / std::numbers::pi, 1e-16);
}

TEST(ClarkeSubdiff, SqcosinvAtOrigin) {
  const SubdiffSet s = Expr::parse("sqcosinv(x)", 1).clarke_subdiff(vec({0.0}));
  EXPECT_EQ(sorted_scalars(s), (std::vector<double>{-1.0, 1.0}));
  EXPECT_EQ(s.ball_radius(), 0.0);
}

TEST(ClarkeSubdiff, AffineInParameterIsSingleton) {
  const SubdiffSet s = Expr::parse("t*x", 1, 1).clarke_subdiff(vec({0.7}), vec({1.5}));
  EXPECT_EQ(sorted_scalars(s), (std::vector<double>{1.5}));
}

TEST(ClarkeSubdiff, MaxAtKinkIsHullOfBothPieces) {
  const SubdiffSet s = Expr::parse("max(x, 0)", 1).clarke_subdiff(vec({0.0}));
  EXPECT_EQ(sorted_scalars(s), (std::vector<double>{0.0, 1.0}));
}

TEST(ClarkeSubdiff, SumIsMinkowskiSum) {
  const SubdiffSet s = Expr::parse("abs(x) + max(x, 0)", 1).clarke_subdiff(vec({0.0}));
  EXPECT_EQ(sorted_scalars(s).front(), -1.0);
  EXPECT_EQ(sorted_scalars(s).back(), 2.0);
}

TEST(ClarkeSubdiff, NegativeScalingFlipsTheSet) {
  const SubdiffSet s = Expr::parse("-2*max(x, 0)", 1).clarke_subdiff(vec({0.0}));
  EXPECT_EQ(sorted_scalars(s), (std::vector<double>{-2.0, 0.0}));
}

TEST(ClarkeSubdiff, SmoothPolynomialsHaveTheGradientOnly) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  for (int k = 0; k < 30; ++k) {
    const int n = 1 + k % 3;
    const sivo::testing::Polynomial p = sivo::testing::random_polynomial(rng, n, 4);
    const Expr e = Expr::parse(p.to_string(), n);
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = U(rng);
    const SubdiffSet s = e.clarke_subdiff(x);
    ASSERT_EQ(s.generators().size(), 1u);
    EXPECT_LE((s.generators()[0] - p.gradient(x)).norm(), 1e-10 * (1.0 + p.gradient(x).norm()));
    EXPECT_NEAR(e.eval(x), p.value(x), 1e-12 * (1.0 + std::abs(p.value(x))));
  }
}

TEST(ClarkeSubdiff, MaxAffineMatchesActiveGradients) {
  std::mt19937_64 rng(102);
  for (int k = 0; k < 30; ++k) {
    const sivo::testing::MaxAffine ma = sivo::testing::random_max_affine(rng, 1 + k % 3);
    const SubdiffSet s = Expr::parse(ma.to_string(), ma.n()).clarke_subdiff(ma.point);
    EXPECT_TRUE(sivo::testing::same_point_set(s.generators(), ma.active_gradients(1e-8))) << ma.to_string();
  }
}

TEST(DirDeriv, KnownValues) {
  EXPECT_DOUBLE_EQ(dir_deriv_upper(Expr::parse("sqcosinv(x)", 1), vec({0.0}), vec({1.0})), 1.0);
  EXPECT_DOUBLE_EQ(dir_deriv_upper(Expr::parse("sqcosinv(x)", 1), vec({0.0}), vec({-3.0})), 3.0);
  EXPECT_DOUBLE_EQ(dir_deriv_upper(Expr::parse("t*x", 1, 1), vec({0.0}), vec({-1.0}), vec({2.0})), -2.0);
  EXPECT_DOUBLE_EQ(dir_deriv_upper(Expr::parse("x^2", 1), vec({3.0}), vec({2.0})), 12.0);
}

TEST(DirDeriv, PositivelyHomogeneousAndSubadditive) {
  std::mt19937_64 rng(103);
  std::normal_distribution<double> N(0.0, 1.0);
  const Expr f = Expr::parse("abs(x1 - x2) + max(x1, 2*x2, 0) - 0.5*abs(x2)", 2);
  const Vector x = vec({0.0, 0.0});
  for (int k = 0; k < 50; ++k) {
    const Vector d1 = vec({N(rng), N(rng)}), d2 = vec({N(rng), N(rng)});
    const double c = std::abs(N(rng)) + 0.1;
    EXPECT_NEAR(dir_deriv_upper(f, x, c * d1), c * dir_deriv_upper(f, x, d1), 1e-12);
    EXPECT_LE(dir_deriv_upper(f, x, d1 + d2), dir_deriv_upper(f, x, d1) + dir_deriv_upper(f, x, d2) + 1e-12);
  }
}

TEST(NumericDirDeriv, SmoothCase) {
  EXPECT_NEAR(numeric_dirderiv(Expr::parse("x^2", 1), vec({1.0}), vec({1.0})).estimate, 2.0, 1e-3);
}

TEST(NumericDirDeriv, RightDerivativeOfMax) {
  EXPECT_NEAR(numeric_dirderiv(Expr::parse("max(x, 0)", 1), vec({0.0}), vec({1.0})).estimate, 1.0, 1e-3);
}

TEST(NumericDirDeriv, SqcosinvAtOrigin) {
  const NumericDirDeriv r = numeric_dirderiv(Expr::parse("sqcosinv(x)", 1), vec({0.0}), vec({1.0}));
  EXPECT_NEAR(r.estimate, 1.0, 5e-2);
  EXPECT_GT(r.samples, 0u);
}

TEST(NumericDirDeriv, NeverExceedsTheSupportFunction) {
  const std::vector<std::string> atoms{"sqcosinv(x)", "abs(x)", "max(x, 0)", "-abs(x)", "min(x, 0)"};
  for (const auto& text : atoms) {
    const Expr f = Expr::parse(text, 1);
    for (double x : {0.0, 0.3, -0.2})
      for (double d : {1.0, -1.0, 2.5}) {
        const double upper = dir_deriv_upper(f, vec({x}), vec({d}));
        EXPECT_LE(numeric_dirderiv(f, vec({x}), vec({d})).estimate, upper + 5e-2) << text << " at " << x;
      }
  }
}

TEST(AtomRegistry, CustomAtomKinkIsUsed) {
  AtomRegistry reg = *AtomRegistry::builtins();
  reg.add(CustomAtom{"relu", [](double u) { return u > 0 ? u : 0.0; }, [](double u) { return u > 0 ? 1.0 : 0.0; },
                     {{0.0, SubdiffSet({Vector::Constant(1, 0.0), Vector::Constant(1, 1.0)})}}});
  auto shared = std::make_shared<const AtomRegistry>(std::move(reg));
  const Expr e = Expr::parse("relu(2*x)", Expr::Context{1, 0, shared});
  EXPECT_DOUBLE_EQ(e.eval(vec({1.0})), 2.0);
  const SubdiffSet s = e.clarke_subdiff(vec({0.0}));
  EXPECT_EQ(sorted_scalars(s), (std::vector<double>{0.0, 2.0}));
}
