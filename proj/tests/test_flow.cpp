#include "renorm/errors.hpp"
#include "renorm/flow.hpp"

#include "oracle_values.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace renorm;

namespace {
VectorField field(double alpha) {
  return VectorField(VectorFieldSpec{MapSpec::cat(alpha), Observable::constant(1.0) + Observable::cosine({1, 0}, 0.3)});
}
}  // namespace

TEST(VectorField, ConstantInLinearCase) {
  const VectorField vf(VectorFieldSpec{MapSpec::cat(0.0)});
  EXPECT_TRUE(vf.is_constant());
  const Vec2 V = vf(Vec2(0.4, 0.1));
  EXPECT_NEAR(V[0], oracle::kStableX, 1e-14);
  EXPECT_NEAR(V[1], oracle::kStableY, 1e-14);
}

TEST(VectorField, RejectsNonPositiveNorm) {
  EXPECT_THROW(VectorField(VectorFieldSpec{MapSpec::cat(0.1), Observable::cosine({1, 0})}), InvalidSpec);
}

TEST(VectorField, NuIsMultiplicative) {
  const VectorField vf = field(0.2);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const Vec2 x(U(rng), U(rng));
    const Vec2 fx = iterate(vf.map(), TorusPoint::from_lift(x), 2).vec();
    EXPECT_NEAR(vf.nu(x, 5), vf.nu(fx, 3) * vf.nu(x, 2), 1e-9 * vf.nu(x, 5));
  }
  const VectorField lin(VectorFieldSpec{MapSpec::cat(0.0)});
  EXPECT_NEAR(lin.nu(Vec2(0.3, 0.3), 3), std::pow(oracle::kNuBar, 3), 1e-14);
}

TEST(Flow, StraightLineInLinearCase) {
  const VectorField vf(VectorFieldSpec{MapSpec::cat(0.0)});
  const TorusPoint q = flow(vf, TorusPoint(0.0, 0.0), 1.0);
  EXPECT_NEAR(q.x1, oracle::kFlowUnitX, 1e-12);
  EXPECT_NEAR(q.x2, oracle::kFlowUnitY, 1e-12);
}

TEST(Flow, Semigroup) {
  const VectorField vf = field(0.2);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const TorusPoint p(U(rng), U(rng));
    const double t1 = 10 * U(rng), t2 = 10 * U(rng);
    EXPECT_LT(torus_distance(flow(vf, flow(vf, p, t1), t2), flow(vf, p, t1 + t2)), 1e-8);
  }
}

TEST(Flow, TransportsTheField) {
  const VectorField vf = field(0.2);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const Vec2 x(U(rng), U(rng));
    const auto [q, J] = flow_with_jacobian(vf, TorusPoint::from_lift(x), 20 * U(rng));
    EXPECT_LT((J * vf(x) - vf(q.vec())).norm(), 1e-7);
  }
}

TEST(Cocycle, LinearClosedForms) {
  const VectorField vf(VectorFieldSpec{MapSpec::cat(0.0)});
  const Cocycle C(vf, Vec2(0.2, 0.7), 3, 10.0);
  const double nu3 = std::pow(oracle::kNuBar, 3);
  EXPECT_NEAR(C.tau(10.0), nu3 * 10.0, 1e-13);
  EXPECT_NEAR(C.tau_inverse(0.5), 0.5 / nu3, 1e-10);
  EXPECT_NEAR(C.grad_tau(10.0).norm(), 0.0, 1e-14);
  Mat2 A3;
  A3 << 13, 8, 8, 5;
  EXPECT_NEAR((C.theta(0.5) - A3).norm(), 0.0, 1e-11);
}

TEST(Cocycle, CommutesWithFlow) {
  const VectorField vf = field(0.3);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const Vec2 x(U(rng), U(rng));
    const double t = 20 * U(rng);
    const int n = 1 + i % 4;
    const Cocycle C(vf, x, n, t);
    const TorusPoint p = TorusPoint::from_lift(x);
    EXPECT_LT(torus_distance(iterate(vf.map(), flow(vf, p, t), n), flow(vf, iterate(vf.map(), p, n), C.tau(t))), 1e-6);
    EXPECT_NEAR(C.tau(C.tau_inverse(0.7 * C.tau(t))), 0.7 * C.tau(t), 1e-10);
  }
}

TEST(Cocycle, GradientMatchesFiniteDifference) {
  const VectorField vf = field(0.1);
  const Vec2 x(0.31, 0.62);
  const Cocycle C(vf, x, 3, 8.0, 1e-12);
  EXPECT_LT((C.grad_tau(8.0) - grad_tau_fd(vf, x, 3, 8.0)).norm(), 1e-5);
}

TEST(Rotation, GoldenSlope) {
  const RotationResult lin = rotation_number(VectorField(VectorFieldSpec{MapSpec::cat(0.0)}), 0, 2000);
  EXPECT_NEAR(lin.rho, oracle::kRotation, 1e-9);
  EXPECT_LT(lin.residual, 1e-9);
  EXPECT_NEAR(diophantine_residual(MapSpec::cat(0.0).A(), oracle::kRotation).residual, 0.0, 1e-12);
  // Without the integer shift the quadratic does not vanish.
  const double r = oracle::kRotation;
  EXPECT_NEAR(std::abs(r * r + r - 1.0), oracle::kRotationResidualK0, 1e-12);
}
