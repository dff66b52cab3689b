#include "renorm/cohomology.hpp"
#include "renorm/errors.hpp"

#include "oracle_values.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace renorm;

namespace {
const Vec2 kGolden(1.0, oracle::kSBar);
const Observable kSin11 = Observable::sine({1, 1});
}  // namespace

TEST(FourierSolve, SingleMode) {
  const Observable h = fourier_solve(kSin11, kGolden);
  EXPECT_NEAR(std::abs(h.coeff({1, 1})), oracle::kHomologyCoeff11, 1e-14);
  EXPECT_EQ(h.coeff({0, 0}), cplx(0.0));
  EXPECT_LE(homology_residual(h, kSin11, kGolden), 1e-10);
}

TEST(FourierSolve, ZeroAndMean) {
  EXPECT_TRUE(fourier_solve(Observable(), kGolden).empty());
  EXPECT_THROW(fourier_solve(Observable::constant(0.3) + kSin11, kGolden), MeanNotZero);
}

TEST(FourierSolve, IdentityForTrigPolynomials) {
  const Observable g = Observable::cosine({2, -1}, 0.7) + Observable::sine({3, 5}, 0.2) + kSin11;
  EXPECT_LE(homology_residual(fourier_solve(g, kGolden), g, kGolden, 1000, 3), 1e-10);
}

TEST(SmallDivisors, GoldenProfile) {
  const auto p = small_divisor_profile(oracle::kSBar, 100);
  bool found = false;
  for (const auto& s : p.table) {
    if (s.k == Mode{8, 5}) {
      found = true;
      EXPECT_NEAR(s.divisor, oracle::kDivisor85, 1e-12);
      EXPECT_NEAR(s.product, oracle::kProduct85, 1e-12);
    }
    if (s.k == Mode{1, 0}) EXPECT_EQ(s.divisor, 1.0);
  }
  EXPECT_TRUE(found);
  EXPECT_NEAR(p.min.product, oracle::kMinProduct100, 1e-12);
  EXPECT_GE(p.min.product, 0.6);
}

TEST(Coboundary, ZeroObservable) {
  const VectorField vf(VectorFieldSpec{MapSpec::cat(0.0)});
  const auto est = coboundary_estimate(vf, Observable(), 1e3, 8);
  EXPECT_EQ(est.H.sup(), 0.0);
  EXPECT_FALSE(est.obstruction_nonzero);
}

TEST(Coboundary, MatchesFourierSolution) {
  const VectorField vf(VectorFieldSpec{MapSpec::cat(0.0)});
  const auto est = coboundary_estimate(vf, kSin11, 1e3, 32);
  EXPECT_LE(est.H.sup(), 5.0);
  const AffineFit fit = affine_fit(est.H, fourier_solve(kSin11, vf(Vec2::Zero())));
  EXPECT_LE(fit.residual, 1e-2);
  EXPECT_NEAR(fit.scale, 1.0, 1e-2);
  EXPECT_LE(coboundary_defect(vf, kSin11, est), 1e-2);
}

TEST(Coboundary, ResidualShrinksWithT) {
  const VectorField vf(VectorFieldSpec{MapSpec::cat(0.0)});
  const Observable h = fourier_solve(kSin11, vf(Vec2::Zero()));
  double prev = INFINITY;
  for (double T : {1e2, 1e3, 1e4}) {
    const double r = affine_fit(coboundary_estimate(vf, kSin11, T, 16).H, h).residual;
    // Non-increasing until the quadrature floor.
    EXPECT_LE(r, std::max(prev * 1.01, 1e-10));
    prev = r;
  }
}

TEST(Coboundary, SupStabilizes) {
  const VectorField vf(VectorFieldSpec{MapSpec::cat(0.0)});
  const auto p = coboundary_sup_profile(vf, kSin11, {10, 30, 100, 300, 1e3, 3e3, 1e4}, 16);
  EXPECT_LT(p.last_decade_growth, 0.01);
}

TEST(Coboundary, ConstantIsFlagged) {
  const VectorField vf(VectorFieldSpec{MapSpec::cat(0.0)});
  const auto est = coboundary_estimate(vf, Observable::constant(1.0), 1e2, 4);
  EXPECT_TRUE(est.obstruction_nonzero);
  const auto rep = lipschitz_diagnostic(vf, Observable::constant(1.0), {1e2, 1e3}, 4);
  EXPECT_TRUE(rep.obstruction_nonzero);
  for (double s : rep.sup_gradient) EXPECT_TRUE(std::isfinite(s));
}

TEST(Lipschitz, LinearMeanZeroIsBounded) {
  const VectorField vf(VectorFieldSpec{MapSpec::cat(0.0)});
  const auto rep = lipschitz_diagnostic(vf, kSin11, {1e2, 1e3, 1e4}, 8);
  EXPECT_LE(rep.trend_slope, 0.05);
  EXPECT_TRUE(rep.bounded);
}
