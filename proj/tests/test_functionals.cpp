#include "renorm/errors.hpp"
#include "renorm/functionals.hpp"

#include "oracle_values.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace renorm;

namespace {
VectorField field(double alpha) {
  return VectorField(VectorFieldSpec{MapSpec::cat(alpha), Observable::constant(1.0) + Observable::cosine({1, 0}, 0.3)});
}
const Observable kG = Observable::cosine({1, 1}) + Observable::sine({0, 1}, 0.5);
}  // namespace

TEST(Mollifier, SmoothStepShape) {
  const Mollifier chi(0.5);
  EXPECT_EQ(chi(0.2), 1.0);
  EXPECT_EQ(chi(1.0), 0.0);
  EXPECT_EQ(chi(1.3), 0.0);
  EXPECT_GT(chi(0.7), 0.0);
  EXPECT_LT(chi(0.7), 1.0);
  EXPECT_NEAR(smooth_step(0.5), 0.5, 1e-15);
}

TEST(ErgodicIntegral, ClosedFormInLinearCase) {
  const VectorField vf(VectorFieldSpec{MapSpec::cat(0.0)});
  const double H = ergodic_integral(vf, Vec2(0.0, 0.0), oracle::kFlowT, Observable::cosine({1, 0}));
  EXPECT_NEAR(H, oracle::kErgodicCos, 1e-10);
}

TEST(ErgodicIntegral, BoundedBySupTimesLength) {
  const VectorField vf = field(0.2);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const double t = 10 * U(rng);
    EXPECT_LE(std::abs(ergodic_integral(vf, Vec2(U(rng), U(rng)), t, kG)), t * kG.sup_bound() + 1e-12);
  }
}

TEST(GradientFunctional, MatchesFiniteDifference) {
  const VectorField vf = field(0.1);
  const Vec2 x(0.27, 0.41);
  const double t = 6.0, h = 1e-5;
  const Vec2 grad = gradient_ergodic_integral(vf, x, t, kG, 1e-12);
  for (const Vec2& v : {Vec2(1.0, 0.0), Vec2(0.0, 1.0), Vec2(0.6, -0.8)}) {
    const double fd =
        (ergodic_integral(vf, x + h * v, t, kG, 1e-12) - ergodic_integral(vf, x - h * v, t, kG, 1e-12)) / (2 * h);
    EXPECT_NEAR(grad.dot(v), fd, 1e-4);
  }
}

TEST(GradientFunctional, AlongTheFieldIsAnIncrement) {
  const VectorField vf = field(0.2);
  const Vec2 x(0.6, 0.15);
  const double t = 7.5;
  const Vec2 grad = gradient_ergodic_integral(vf, x, t, kG, 1e-12);
  const Vec2 y = trace(vf, x, t).position(t);
  EXPECT_NEAR(grad.dot(vf(x)), kG(y) - kG(x), 1e-6);
}

TEST(RenormalizationDepth, LinearPowerFormula) {
  const VectorField vf(VectorFieldSpec{MapSpec::cat(0.0)});
  EXPECT_EQ(renormalization_depth(vf, 10.0), 2);
  EXPECT_EQ(n_t_pointwise(vf, Vec2(0.1, 0.2), 10.0), 3);
}

TEST(RenormalizationDepth, LogarithmicBracket) {
  const VectorField vf = field(0.2);
  for (double t : {10.0, 1e3, 1e5})
    EXPECT_LE(std::abs(n_t_pointwise(vf, Vec2(0.3, 0.9), t) - std::log(t) / oracle::kHTop), 5.0);
}

TEST(Transfer, BasicStepIdentity) {
  const VectorField vf = field(0.2);
  const Vec2 x(0.35, 0.55);
  const double t = 4.0;
  for (int n = 1; n <= 3; ++n) {
    const Cocycle C(vf, x, n, t);
    const double lhs = ergodic_integral(vf, x, t, kG);
    const double rhs = ergodic_integral(vf, C.image(), C.tau(t), transfer_pointwise(vf, as_field(kG), n));
    EXPECT_NEAR(lhs, rhs, 1e-6) << "n = " << n;
  }
}

TEST(Decomposition, ReconstructsTheIntegral) {
  for (double alpha : {0.0, 0.2}) {
    const VectorField vf = field(alpha);
    for (double t : {10.0, 100.0}) {
      const Vec2 x(0.12, 0.77);
      const Decomposition D = decompose(vf, x, t);
      EXPECT_LE(D.K, D.n_t);
      EXPECT_NEAR(reconstruct(vf, D, as_field(kG)), ergodic_integral(vf, x, t, kG), 1e-6)
          << "alpha " << alpha << " t " << t;
    }
  }
}

TEST(Growth, LinearSlopes) {
  const VectorField vf(VectorFieldSpec{MapSpec::cat(0.0)});
  const std::vector<Vec2> xs{{0.1, 0.2}, {0.5, 0.3}, {0.8, 0.9}};
  const GrowthFit with_mean = growth_exponent(vf, Observable::constant(0.7) + Observable::cosine({1, 0}), xs, 10, 1e4);
  const GrowthFit mean_zero = growth_exponent(vf, kG, xs, 10, 1e4);
  EXPECT_NEAR(with_mean.slope, 1.0, 0.01);
  EXPECT_LE(mean_zero.slope, 0.05);
}

TEST(Errors, InvalidArguments) {
  const VectorField vf = field(0.1);
  EXPECT_THROW(decompose(vf, Vec2(0.1, 0.1), -1.0), InvalidSpec);
  EXPECT_THROW(loglog_slope({1.0}, {1.0}), InvalidSpec);
}
