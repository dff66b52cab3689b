#include "renorm/errors.hpp"
#include "renorm/forms.hpp"
#include "renorm/functionals.hpp"

#include "oracle_values.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace renorm;

namespace {
VectorField field(double alpha) {
  return VectorField(VectorFieldSpec{MapSpec::cat(alpha), Observable::constant(1.0) + Observable::cosine({1, 0}, 0.3)});
}
const Observable kG = Observable::cosine({1, 1}) + Observable::cosine({0, 1}, 0.5);
const VectorWindow kWindow = [](double s) { return Vec2(std::sin(M_PI * s), 0.3 * s * (1 - s)); };
}  // namespace

class FormIdentities : public ::testing::TestWithParam<std::tuple<double, int>> {};

TEST_P(FormIdentities, WindowTransfer) {
  const auto [alpha, n] = GetParam();
  const ExtMapSpec e(MapSpec::cat(alpha));
  const VectorField vf = field(alpha);
  const IdentityCheck c = h1_window_transfer(e, vf, lift_differential(kG), Vec2(0.31, 0.57), n, kWindow);
  EXPECT_LE(c.residual(), 1e-5) << c.lhs << " vs " << c.rhs;
}

TEST_P(FormIdentities, GradientTransfer) {
  const auto [alpha, n] = GetParam();
  const ExtMapSpec e(MapSpec::cat(alpha));
  const VectorField vf = field(alpha);
  const IdentityCheck c = gradient_transfer(e, vf, kG, Vec2(0.31, 0.57), Vec2(0.6, -0.8), 3.0, n);
  EXPECT_LE(c.residual(), 1e-4) << c.lhs << " vs " << c.rhs;
}

INSTANTIATE_TEST_SUITE_P(AlphaAndDepth, FormIdentities,
                         ::testing::Combine(::testing::Values(0.0, 0.1, 0.3), ::testing::Values(1, 2)));

TEST(Forms, TransferPowerZeroIsIdentity) {
  const ExtMapSpec e(MapSpec::cat(0.2));
  const VectorField vf = field(0.2);
  const OneForm g = lift_differential(kG);
  const OneForm g0 = one_form_transfer_power(e, vf, g, 0);
  EXPECT_EQ(g0(Vec2(0.2, 0.3), -1.5, Vec2(1.0, 2.0)), g(Vec2(0.2, 0.3), -1.5, Vec2(1.0, 2.0)));
  const OneForm g1 = one_form_transfer_power(e, vf, g, 1);
  EXPECT_NEAR(g1(Vec2(0.2, 0.3), -1.5, Vec2(1.0, 2.0)),
              one_form_transfer(e, vf, g, {Vec2(0.2, 0.3), -1.5}, Vec2(1.0, 2.0)), 1e-14);
}

TEST(Leaves, ConstantPairing) {
  const Leaf W = straight_leaf(Vec2(0.1, 0.2), -1.2, 0.4);
  EXPECT_NEAR(W.length(), 0.4, 1e-13);
  const double v = leaf_pairing(W, [](double s) { return std::sin(M_PI * s); }, [](const Vec2&, double) { return 1.0; });
  EXPECT_NEAR(v, oracle::kLeafSinPairing, 1e-10);
}

TEST(Leaves, Validation) {
  const SlopeBracket b = stable_slope_bracket(MapSpec::cat(0.0));
  EXPECT_NO_THROW(validate_leaf(straight_leaf(Vec2(0.1, 0.2), b.mid(), 0.4), b, 0.5));
  EXPECT_THROW(validate_leaf(straight_leaf(Vec2(0.1, 0.2), 2.0, 0.4), b, 0.5), LeafInvalid);
  EXPECT_THROW(validate_leaf(straight_leaf(Vec2(0.1, 0.2), b.mid(), 0.1), b, 0.5), LeafInvalid);
  for (const Leaf& W : random_stable_leaves(b, 16, 0.5, 4).leaves) EXPECT_NO_THROW(validate_leaf(W, b, 0.5));
}

TEST(Leaves, SeminormBoundsWindowedFunctionals) {
  // |H_{x,phi}(g)| <= C |supp phi| |phi|_C1 |g|_sampled on a random set, with one C for all.
  const VectorField vf = field(0.0);
  const SlopeBracket b = stable_slope_bracket(MapSpec::cat(0.0));
  const LeafFamily fam = random_stable_leaves(b, 32, 0.5, 2);
  double C = 0.0;
  for (int j = 1; j <= 3; ++j) {
    const Observable g = Observable::cosine({j, j - 1});
    const ExtFunction gl = [g](const Vec2& x, double) { return g(x); };
    const double semi = sampled_seminorm(gl, fam, 1);
    ASSERT_GT(semi, 0.0);
    WindowFunction w{0.0, 0.5, [](double t) { return std::sin(2 * M_PI * t) * std::sin(2 * M_PI * t); }};
    const double H = mollified_functional(vf, Vec2(0.2, 0.3), w, as_field(g));
    C = std::max(C, std::abs(H) / (w.length() * w.sampled_c1_norm() * semi));
  }
  EXPECT_LT(C, 10.0);
  EXPECT_THROW(sampled_seminorm([](const Vec2&, double) { return 1.0; }, fam, -1), InvalidSpec);
}
