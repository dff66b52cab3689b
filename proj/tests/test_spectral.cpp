#include "renorm/errors.hpp"
#include "renorm/extension.hpp"
#include "renorm/spectral.hpp"

#include "oracle_values.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace renorm;

namespace {
VectorField field(double alpha) {
  return VectorField(VectorFieldSpec{MapSpec::cat(alpha), Observable::constant(1.0) + Observable::cosine({1, 0}, 0.3)});
}
double nearest(const SpectralResult& r, double want) {
  double best = INFINITY;
  for (const auto& z : r.resonances) best = std::min(best, std::abs(z.rho - cplx(want)));
  return best;
}
}  // namespace

TEST(Extension, FixedSlopeAtOrigin) {
  const ExtMapSpec e(MapSpec::cat(0.0));
  const ExtPoint q = ext_map(e, {Vec2(0.0, 0.0), oracle::kSBar});
  EXPECT_LT(torus_distance(q.x, Vec2(0.0, 0.0)), 1e-15);
  EXPECT_NEAR(q.s, oracle::kSBar, 1e-13);
}

TEST(Extension, BackwardSlopeIsMoebius) {
  const ExtMapSpec e(MapSpec::cat(0.0));
  for (double s : {-2.0, -1.6, -1.1}) {
    const ExtPoint q = ext_map_inverse(e, {Vec2(0.3, 0.4), s});
    EXPECT_NEAR(q.s, (2 * s - 1) / (1 - s), 1e-12);
    // forward slope action psi(s) = (1 + s)/(2 + s) undoes it
    EXPECT_NEAR((1 + q.s) / (2 + q.s), s, 1e-12);
  }
}

TEST(Extension, LinearWeight) {
  const ExtMapSpec e(MapSpec::cat(0.0));
  const VectorField vf(VectorFieldSpec{MapSpec::cat(0.0)});
  EXPECT_NEAR(transfer_weight(e, vf, Vec2(0.3, 0.7), -1.5), 2.5, 1e-14);
  EXPECT_NEAR(transfer_weight(e, vf, Vec2(0.3, 0.7), oracle::kSBar), oracle::kLambda, 1e-13);
}

TEST(Extension, SectionWeightIsInverseNu) {
  const MapSpec m = MapSpec::cat(0.2);
  const ExtMapSpec e(m);
  const VectorField vf = field(0.2);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const Vec2 y(U(rng), U(rng));
    EXPECT_NEAR(transfer_weight(e, vf, y, section_slope(vf, y)), vf.inverse_weight(y, 1), 1e-12);
  }
}

TEST(Extension, AnalyticEigenfunctions) {
  const IMat2 A = MapSpec::cat(0.0).A();
  const auto spec = analytic_linear_spectrum(A, 3);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(spec[std::size_t(k)], oracle::kResonance[k], 1e-14);
  double worst = 0.0;
  for (int i = 0; i < 64; ++i) {
    const double s = -2.0 + 1.0 * i / 63.0;
    const double lhs = analytic_eigenfunction(A, 0, s) / oracle::kNuBar;
    const double rhs = (1 - s) * analytic_eigenfunction(A, 0, (2 * s - 1) / (1 - s));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  EXPECT_LT(worst, 1e-10);
  EXPECT_NEAR(analytic_eigenfunction(A, 1, oracle::kSBar), 0.0, 1e-12);
  const double h = 1e-4;
  EXPECT_GT(std::abs(analytic_eigenfunction(A, 1, oracle::kSBar + h) - analytic_eigenfunction(A, 1, oracle::kSBar - h)), 1e-6);
}

TEST(Extension, GridTransferAgreesAtNodes) {
  const MapSpec m = MapSpec::cat(0.2);
  const ExtMapSpec e(m);
  const VectorField vf = field(0.2);
  const ExtFunction f = [](const Vec2& x, double s) { return std::cos(2 * M_PI * x[0]) + s * s; };
  OmegaGrid g(e.bracket(), 16, 12);
  g.fill(f);
  const OmegaGrid h = transfer_apply(e, vf, g);
  const ExtFunction Lf = transfer_pointwise_ext(e, vf, f, 1);
  for (int i = 0; i < 16; i += 5)
    for (int k = 0; k < 12; k += 4) EXPECT_NEAR(h.at(i, 3, k), Lf(h.x_at(i, 3), h.s_at(k)), 1e-12);
}

TEST(Traces, LinearClosedForm) {
  const ExtMapSpec e(MapSpec::cat(0.0));
  const TraceSequence ts = trace_sequence(e, 10);
  for (int n = 1; n <= 10; ++n) {
    EXPECT_NEAR(ts.values[std::size_t(n - 1)] / oracle::kTrace[n - 1], 1.0, 1e-9) << "n = " << n;
    EXPECT_EQ(ts.counts[std::size_t(n - 1)], oracle::kFixedCount[n - 1]);
  }
  EXPECT_NEAR(ts.values[0], oracle::kTrace[0], 1e-9);
}

TEST(Traces, OrbitSumOracleAgreesWithClosedForm) {
  for (int n = 0; n < 10; ++n) EXPECT_NEAR(oracle::kTraceByOrbits[n] / oracle::kTrace[n], 1.0, 1e-15);
}

TEST(Determinant, LinearCoefficients) {
  const TraceSequence ts = trace_sequence(ExtMapSpec(MapSpec::cat(0.0)), 10);
  const auto c = determinant_coeffs(ts);
  for (int m = 0; m <= 10; ++m) EXPECT_NEAR(c[std::size_t(m)], oracle::kDetCoeff[m], 1e-8) << "m = " << m;
  EXPECT_NEAR(c[1], -oracle::kTrace[0], 1e-12);
}

TEST(Determinant, LinearResonances) {
  const SpectralResult r = resonances_from_determinant(trace_sequence(ExtMapSpec(MapSpec::cat(0.0)), 10), oracle::kHTop);
  for (int k = 0; k < 3; ++k) EXPECT_LT(nearest(r, oracle::kResonance[k]), 1e-6);
  ASSERT_FALSE(r.resonances.empty());
  EXPECT_NEAR(std::abs(r.resonances[0].rho), std::exp(oracle::kHTop), 1e-6);
  EXPECT_NEAR(r.resonances[0].alpha, 1.0, 1e-9);
}

TEST(Determinant, PerturbedLeadingResonance) {
  const SpectralResult r = resonances_from_determinant(trace_sequence(ExtMapSpec(MapSpec::cat(0.1)), 10), oracle::kHTop);
  ASSERT_FALSE(r.resonances.empty());
  EXPECT_NEAR(std::abs(r.resonances[0].rho), std::exp(oracle::kHTop), 1e-3);
}

TEST(Galerkin, LinearSpectrumAndEigenfunction) {
  const ExtMapSpec e(MapSpec::cat(0.0));
  const VectorField vf(VectorFieldSpec{MapSpec::cat(0.0)});
  const GalerkinMatrix G = galerkin_matrix(e, vf, 16, 16);
  const auto eig = galerkin_eigs(G, 0.05);
  ASSERT_GE(eig.size(), 2u);
  bool lead = false, second = false;
  for (const auto& p : eig) {
    if (std::abs(p.value - oracle::kLambda) < 1e-8) {
      lead = true;
      EXPECT_LT(off_zero_energy(G, p), 1e-8);
    }
    second = second || std::abs(p.value - oracle::kNuBar) < 1e-8;
  }
  EXPECT_TRUE(lead);
  EXPECT_TRUE(second);
}

TEST(Galerkin, TruncationStableSpectrum) {
  const ExtMapSpec e(MapSpec::cat(0.0));
  const VectorField vf(VectorFieldSpec{MapSpec::cat(0.0)});
  const SpectralResult r = galerkin_spectrum(e, vf, oracle::kHTop);
  for (int k = 0; k < 3; ++k) EXPECT_LT(nearest(r, oracle::kResonance[k]), 1e-6);
  for (const auto& z : r.resonances) EXPECT_LE(z.err, 1e-6 * std::abs(z.rho));
}

TEST(Obstructions, LinearCaseIsLebesgue) {
  const ExtMapSpec e(MapSpec::cat(0.0));
  const VectorField vf(VectorFieldSpec{MapSpec::cat(0.0)});
  const SpectralResult r = galerkin_spectrum(e, vf, oracle::kHTop);
  ASSERT_EQ(r.obstructions.size(), 1u);
  const auto& O = r.obstructions[0];
  EXPECT_GT(std::abs(O(Observable::constant(1.0))), 0.1);
  EXPECT_LT(std::abs(O(Observable::cosine({1, 1}) + Observable::sine({2, -1}))), 1e-8);
  // Positive on sampled nonnegative observables.
  for (double a : {0.2, 0.5, 0.9}) {
    const Observable g = Observable::constant(1.0) + Observable::cosine({1, 0}, a);
    EXPECT_GT((O(g) / O(Observable::constant(1.0))).real(), 0.0);
  }
}

TEST(Galerkin, SizeOverflow) {
  const ExtMapSpec e(MapSpec::cat(0.1));
  const VectorField vf = field(0.1);
  GalerkinOptions opt;
  opt.max_dim = 100;
  EXPECT_THROW(galerkin_matrix(e, vf, 16, 16, opt), SizeOverflow);
}
