#include "support/oracles.hpp"

#include <sivo/conic.hpp>
#include <sivo/errors.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace sivo;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

bool contains_approx(const std::vector<Vector>& set, const Vector& v) {
  for (const auto& s : set)
    if ((s - v).norm() < 1e-12) return true;
  return false;
}

ConeConstrainedProblem coordinate_problem(PolyCone cone) {
  return ConeConstrainedProblem{2, {Expr::parse("x1^2 + x2^2", 2)}, {Expr::parse("x1", 2), Expr::parse("x2", 2)},
                                std::move(cone), OmegaSet::whole(2)};
}

Problem single_variable(std::initializer_list<const char*> objectives) {
  std::vector<Expr> f;
  for (const char* t : objectives) f.push_back(Expr::parse(t, 1));
  return Problem(1, std::move(f), {}, OmegaSet::whole(1));
}

SdpData upper_bound_zero() { return SdpData{1, {Matrix::Zero(1, 1), Matrix::Identity(1, 1)}}; }

}  // namespace

TEST(PolyCone, OrthantIsSelfDual) {
  const PolyCone K(2, {vec({1, 0}), vec({0, 1})});
  ASSERT_EQ(K.dual_generators().size(), 2u);
  EXPECT_TRUE(contains_approx(K.dual_generators(), vec({1, 0})));
  EXPECT_TRUE(contains_approx(K.dual_generators(), vec({0, 1})));
}

TEST(PolyCone, OneNormCone) {
  const PolyCone K(2, {vec({1, 1}), vec({-1, 1})});
  const double h = 1.0 / std::sqrt(2.0);
  ASSERT_EQ(K.dual_generators().size(), 2u);
  EXPECT_TRUE(contains_approx(K.dual_generators(), vec({h, h})));
  EXPECT_TRUE(contains_approx(K.dual_generators(), vec({-h, h})));
}

TEST(PolyCone, RayHasHalfPlaneDual) {
  const PolyCone K(2, {vec({0, 1})});
  const auto& d = K.dual_generators();
  EXPECT_TRUE(contains_approx(d, vec({1, 0})));
  EXPECT_TRUE(contains_approx(d, vec({-1, 0})));
  EXPECT_TRUE(contains_approx(d, vec({0, 1})));
  for (const auto& s : d) EXPECT_TRUE(K.in_dual(s));
}

TEST(PolyCone, RejectsLargeDimension) {
  std::vector<Vector> gens;
  for (int i = 0; i < 7; ++i) gens.push_back(Vector::Unit(7, i));
  EXPECT_THROW(PolyCone(7, gens), PreconditionError);
}

TEST(Scalarize, OrthantGivesCoordinateConstraints) {
  const Problem P = scalarize_cone_problem(coordinate_problem(PolyCone(2, {vec({1, 0}), vec({0, 1})})));
  EXPECT_TRUE(is_feasible(P, vec({-1, -2})).feasible);
  EXPECT_FALSE(is_feasible(P, vec({-1, 0.5})).feasible);
  EXPECT_EQ(P.all_indices().size(), 2u);
}

TEST(Scalarize, MembershipMatchesPrimalTest) {
  std::mt19937_64 rng(61);
  std::normal_distribution<double> N(0.0, 1.0);
  const std::vector<PolyCone> cones{PolyCone(2, {vec({1, 0}), vec({0, 1})}), PolyCone(2, {vec({1, 1}), vec({-1, 1})}),
                                    PolyCone(2, {vec({0, 1})})};
  for (const auto& K : cones) {
    const Problem P = scalarize_cone_problem(coordinate_problem(K));
    for (int k = 0; k < 300; ++k) {
      const Vector x = vec({N(rng), N(rng)});
      EXPECT_EQ(K.contains_negative(x), gmax(P, x) <= 1e-9) << format_vector(x);
    }
    // points on the boundary of -K
    for (const auto& g : K.generators()) {
      const Vector x = -std::abs(N(rng)) * g;
      EXPECT_TRUE(K.contains_negative(x));
      EXPECT_LE(gmax(P, x), 1e-9);
    }
  }
}

TEST(RecoverZeta, Examples) {
  const PolyCone orthant(2, {vec({1, 0}), vec({0, 1})});
  std::size_t e1 = 0;
  while ((orthant.dual_generators()[e1] - vec({1, 0})).norm() > 1e-12) ++e1;
  MultiplierMu mu;
  mu.entries.push_back({IndexRef{0, e1}, 2.0});
  EXPECT_LE((recover_zeta(mu, orthant) - vec({2, 0})).norm(), 1e-12);
  EXPECT_EQ(recover_zeta(MultiplierMu{}, orthant), Vector::Zero(2));

  const PolyCone l1(2, {vec({1, 1}), vec({-1, 1})});
  MultiplierMu both;
  both.entries.push_back({IndexRef{0, 0}, 1.0});
  both.entries.push_back({IndexRef{0, 1}, 1.0});
  const Vector zeta = recover_zeta(both, l1);
  EXPECT_LE((zeta - vec({0, std::sqrt(2.0)})).norm(), 1e-12);
  EXPECT_TRUE(l1.in_dual(zeta));
}

TEST(RecoverZeta, RejectsForeignSupport) {
  const PolyCone orthant(2, {vec({1, 0}), vec({0, 1})});
  MultiplierMu mu;
  mu.entries.push_back({IndexRef{0, 7}, 1.0});
  EXPECT_THROW(recover_zeta(mu, orthant), Error);
}

TEST(SdpKkt, IncreasingObjectivesAreRefuted) {
  const SdpCertificate s = sdp_check_kkt(single_variable({"x", "x"}), upper_bound_zero(), vec({0.0}), vec({0.1, 0.1}));
  EXPECT_EQ(s.cert.verdict, Verdict::Refuted);
  EXPECT_NEAR(s.cert.residual, 0.9, 1e-12);
  EXPECT_NEAR(s.Lambda(0, 0), 0.0, 1e-12);
}

TEST(SdpKkt, DecreasingObjectivesAreCertified) {
  const SdpCertificate s = sdp_check_kkt(single_variable({"-x", "-x"}), upper_bound_zero(), vec({0.0}), vec({0.1, 0.1}));
  EXPECT_EQ(s.cert.verdict, Verdict::Certified);
  EXPECT_LE(s.cert.residual, 1e-12);
  EXPECT_GE(s.lambda_min_eig, -1e-10);
  EXPECT_LE(std::abs(s.complementarity), 1e-8);
  EXPECT_LE(s.cert.recompute_residual(), 1e-10);

  SdpOptions o;
  o.Lambda = Matrix::Identity(1, 1);
  o.lambda = vec({0.5, 0.5});
  const SdpCertificate v = sdp_check_kkt(single_variable({"-x", "-x"}), upper_bound_zero(), vec({0.0}), vec({0.1, 0.1}), o);
  EXPECT_EQ(v.cert.verdict, Verdict::Certified);
  EXPECT_EQ(v.active_rank, 1);
}

TEST(SdpKkt, InactiveConstraintForcesZeroMultiplier) {
  const SdpData sd{1, {-Matrix::Identity(1, 1), Matrix::Identity(1, 1)}};
  const SdpCertificate s = sdp_check_kkt(single_variable({"-x", "-x"}), sd, vec({0.0}), vec({0.1, 0.1}));
  EXPECT_EQ(s.active_rank, 0);
  EXPECT_EQ(s.Lambda.norm(), 0.0);
  EXPECT_EQ(s.cert.verdict, Verdict::Refuted);
}

TEST(SdpKkt, InfeasiblePointIsAnError) {
  EXPECT_THROW(sdp_check_kkt(single_variable({"x"}), upper_bound_zero(), vec({1.0}), vec({0.1})), Error);
}

TEST(SdpKkt, DiagonalDataMatchesScalarConstraints) {
  std::mt19937_64 rng(62);
  for (int k = 0; k < 10; ++k) {
    const sivo::testing::DiagonalSdp inst = sivo::testing::random_diagonal_sdp(rng);
    const SdpCertificate s = sdp_check_kkt(inst.base, inst.sdp, inst.point, inst.xi);
    const Certificate c = check_kkt(inst.scalar, inst.point, inst.xi);
    EXPECT_NEAR(s.cert.residual, c.residual, 1e-6);
    EXPECT_GE(s.lambda_min_eig, -1e-10);
  }
}

TEST(FrobeniusDot, Trace) {
  Matrix A(2, 2), B(2, 2);
  A << 1, 2, 2, 3;
  B << 4, 5, 5, 6;
  EXPECT_DOUBLE_EQ(frobenius_dot(A, B), 4 + 10 + 10 + 18);
}
