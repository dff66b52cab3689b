#include "renorm/errors.hpp"
#include "renorm/torus.hpp"

#include "oracle_values.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace renorm;

TEST(Map, ShearThenAutomorphism) {
  const MapSpec m = MapSpec::cat(0.3);
  const TorusPoint q = apply_map(m, TorusPoint(0.25, 0.0));
  EXPECT_NEAR(q.x1, oracle::kMapFirstAt025, 1e-14);
  EXPECT_NEAR(q.x2, oracle::kMapSecondAt025, 1e-14);
}

TEST(Map, JacobianAtOrigin) {
  const Mat2 J = jacobian(MapSpec::cat(0.3), TorusPoint(0.0, 0.0));
  EXPECT_NEAR(J(0, 0), 1.7, 1e-15);
  EXPECT_NEAR(J(0, 1), 1.0, 1e-15);
  EXPECT_NEAR(J(1, 0), 0.7, 1e-15);
  EXPECT_NEAR(J(1, 1), 1.0, 1e-15);
}

TEST(Map, AreaPreservingForEveryAlpha) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (double a : {0.0, 0.2, 0.6})
    for (int i = 0; i < 50; ++i) EXPECT_NEAR(jacobian(MapSpec::cat(a), TorusPoint(U(rng), U(rng))).determinant(), 1.0, 1e-14);
}

TEST(Map, InverseRoundTrip) {
  const MapSpec m = MapSpec::cat(0.5);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const TorusPoint q(U(rng), U(rng));
    worst = std::max(worst, torus_distance(apply_map(m, invert_map(m, q)), q));
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Map, RejectsInvalidSpecs) {
  IMat2 A;
  A << 1, 1, 0, 1;
  EXPECT_THROW(MapSpec(A, 0.0, Variant::StandardFamily), InvalidSpec);
  IMat2 B;
  B << 2, 1, 1, 1;
  EXPECT_THROW(MapSpec(B, 0.1, Variant::Linear), InvalidSpec);
  EXPECT_THROW(MapSpec(B, 1.2, Variant::StandardFamily), InvalidSpec);
}

TEST(StableDirection, LinearEigenvector) {
  const Vec2 v = stable_direction(MapSpec::cat(0.0), TorusPoint(0.3, 0.8));
  EXPECT_NEAR(std::abs(v[0]), oracle::kStableX, 1e-12);
  EXPECT_NEAR(v[1] / v[0], oracle::kStableY / oracle::kStableX, 1e-12);
  const Mat2 J = jacobian(MapSpec::cat(0.0), TorusPoint(0.3, 0.8));
  EXPECT_NEAR((J * v).norm(), oracle::kNuBar, 1e-12);
}

TEST(StableDirection, InvariantUnderPerturbedMap) {
  const MapSpec m = MapSpec::cat(0.2);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const TorusPoint p(U(rng), U(rng));
    const Vec2 w = jacobian(m, p) * stable_direction(m, p);
    const Vec2 e = stable_direction(m, apply_map(m, p));
    EXPECT_LT(std::abs(w[0] * e[1] - w[1] * e[0]) / w.norm(), 1e-9);
  }
}

TEST(PeriodicPoints, LinearCountsMatchDeterminant) {
  const MapSpec m = MapSpec::cat(0.0);
  for (int n = 1; n <= 8; ++n) {
    EXPECT_EQ(fixed_point_count(m.A(), n), oracle::kFixedCount[n - 1]);
    EXPECT_EQ(long(periodic_points(m, n).size()), oracle::kFixedCount[n - 1]) << "n = " << n;
  }
  const auto fix = periodic_points(m, 1);
  ASSERT_EQ(fix.size(), 1u);
  EXPECT_LT(torus_distance(fix[0].points[0], TorusPoint(0.0, 0.0)), 1e-15);
}

TEST(PeriodicPoints, ContinuedPointsAreFixed) {
  const MapSpec m = MapSpec::cat(0.1);
  for (int n = 1; n <= 5; ++n) {
    const auto orb = periodic_points(m, n);
    EXPECT_EQ(long(orb.size()), oracle::kFixedCount[n - 1]);
    for (const auto& o : orb) EXPECT_LT(torus_distance(iterate(m, o.points[0], n), o.points[0]), 1e-10);
  }
}

TEST(Entropy, LogOfLeadingEigenvalue) {
  EXPECT_NEAR(topological_entropy(MapSpec::cat(0.0)), oracle::kHTop, 1e-13);
  EXPECT_NEAR(topological_entropy(MapSpec::cat(0.4)), oracle::kHTop, 1e-13);
}
