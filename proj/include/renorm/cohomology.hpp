#pragma once

#include "renorm/functionals.hpp"
#include "renorm/spectral.hpp"

#include <vector>

namespace renorm {

/// h with <V, grad h> = g for a constant V; h_0 = 0. Throws MeanNotZero if g_0 != 0.
Observable fourier_solve(const Observable& g, const Vec2& V);

/// max over `samples` uniform points of |<V, grad h> - g|.
double homology_residual(const Observable& h, const Observable& g, const Vec2& V, int samples = 1000,
                         std::uint64_t seed = 1);

struct SmallDivisor {
  Mode k{0, 0};
  double divisor = 0.0;  ///< |k_1 + omega k_2|
  double product = 0.0;  ///< |k|_inf * divisor
};

struct SmallDivisorProfile {
  std::vector<SmallDivisor> table;  ///< one of each pair +-k, ordered by k
  SmallDivisor min;                 ///< smallest product
};

/// All k != 0 with |k|_inf <= K.
SmallDivisorProfile small_divisor_profile(double omega, int K);

/// Values on the n x n lattice x = (i/n, j/n); index i * n + j.
struct GridFunction {
  int n = 0;
  std::vector<double> values;
  Vec2 point(int i, int j) const { return {double(i) / n, double(j) / n}; }
  double sup() const;
};

struct CoboundaryEstimate {
  double T = 0.0;
  int n_T = 0;
  GridFunction H;                    ///< renormalized average on the grid
  bool obstruction_nonzero = false;  ///< H may be unbounded in T
  double obstruction_size = 0.0;     ///< max |O_i(g)| used for the flag
};

/**
 * @brief Renormalized average of g on a grid at time T.
 *
 * Without obstruction functionals only the mean is tested. A nonzero
 * obstruction is reported in the flag, never thrown.
 */
CoboundaryEstimate coboundary_estimate(const VectorField& vf, const Observable& g, double T, int grid,
                                       const std::vector<ObstructionFunctional>* obstructions = nullptr,
                                       const Mollifier& chi = Mollifier(), double obstruction_tol = 1e-10);

/// a H + b fitted to ref by least squares; residual is sup |H - ref - c| with c the mean offset.
struct AffineFit {
  double scale = 0.0;
  double offset = 0.0;
  double residual = 0.0;
};
AffineFit affine_fit(const GridFunction& H, const Observable& ref);

/// max over every stride-th grid point of |<V, grad H-bar_T> - g|.
double coboundary_defect(const VectorField& vf, const Observable& g, const CoboundaryEstimate& est,
                         int stride = 4, const Mollifier& chi = Mollifier());

struct BoundednessProfile {
  std::vector<double> T;
  std::vector<double> sup;          ///< grid sup of |H-bar_T|
  std::vector<double> running_max;
  /// Relative increase of the running max over T in [T_last / 10, T_last].
  double last_decade_growth = 0.0;
};

BoundednessProfile coboundary_sup_profile(const VectorField& vf, const Observable& g,
                                          const std::vector<double>& T_list, int grid,
                                          const Mollifier& chi = Mollifier());

struct LipschitzReport {
  std::vector<double> T;
  std::vector<double> sup_gradient;  ///< grid sup of |grad H-bar_T(g)|
  double trend_slope = 0.0;          ///< log-log slope of sup_gradient against T
  bool bounded = false;              ///< trend_slope <= 0.05
  bool obstruction_nonzero = false;
};

/// Gradient taken from the chi' correction plus the gradient functional, never by differencing.
LipschitzReport lipschitz_diagnostic(const VectorField& vf, const Observable& g,
                                     const std::vector<double>& T_list, int grid,
                                     const Mollifier& chi = Mollifier());

}  // namespace renorm
