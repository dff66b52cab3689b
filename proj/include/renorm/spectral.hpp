#pragma once

#include "renorm/extension.hpp"
#include "renorm/observable.hpp"

#include <Eigen/Sparse>

#include <complex>
#include <string>
#include <vector>

namespace renorm {

struct Resonance {
  cplx rho;
  double alpha = 0.0;  ///< ln|rho| / h_top
  double err = 0.0;    ///< |rho_N - rho_{N-1}| across truncation orders
};

/// Weight per Fourier mode; O(g) = sum_k weight_k * g_k.
struct ObstructionFunctional {
  cplx rho;
  std::vector<std::pair<Mode, cplx>> weights;
  cplx operator()(const Observable& g) const;
};

struct SpectralResult {
  std::vector<Resonance> resonances;  ///< by decreasing modulus
  std::vector<double> traces;         ///< T_1..T_N (determinant method)
  std::string method;                 ///< "determinant" or "galerkin"
  double cutoff = 0.05;
  std::vector<ObstructionFunctional> obstructions;  ///< after rank deduplication
};

struct TraceSequence {
  std::vector<double> values;   ///< T_n at index n - 1
  std::vector<double> errors;   ///< rounding bound per T_n
  std::vector<long> counts;     ///< points of Fix F^n
  std::vector<double> min_det;  ///< smallest |det(I - D F^n)| over the orbit set
};

/**
 * @brief Flat trace of L^n summed over Fix F^n.
 *
 * The fiber fixed slope of each point comes from iterating the contracting
 * backward loop map; the weight product along a closed loop does not depend
 * on V or on the fiber norm. Throws FiberNonConvergence.
 */
double orbit_trace(const ExtMapSpec& e, int n, double* err = nullptr, long* count = nullptr,
                   double* min_det = nullptr);
TraceSequence trace_sequence(const ExtMapSpec& e, int N);

/// det(1 - zL) coefficients from traces; optional rounding bound per coefficient.
std::vector<double> determinant_coeffs(const TraceSequence& traces,
                                       std::vector<double>* noise = nullptr);

/**
 * @brief Reciprocal zeros of the truncated determinant.
 *
 * Coefficients below ten times their noise bound are dropped from the top.
 * A resonance is retained when the polynomial one degree lower than the
 * trimmed one reproduces it within rel_stable and |rho| >= cutoff.
 */
SpectralResult resonances_from_determinant(const TraceSequence& traces, double h_top,
                                           double cutoff = 0.05, double rel_stable = 1e-4);

struct GalerkinOptions {
  int K = 16;               ///< Fourier modes |k_i| <= K/2 - 1
  int M = 16;               ///< Chebyshev polynomials in s
  int dense_cap = 512;      ///< largest block given to the dense solver
  int n_iter_eigs = 16;     ///< wanted eigenvalues per block above the cap
  int max_dim = 40000;      ///< SizeOverflow above this matrix dimension
  int fft = 128;            ///< samples in z_1 for the shear expansion
  double drop = 1e-15;      ///< relative entry threshold
};

/**
 * @brief Matrix of L on Fourier x Chebyshev coefficients.
 *
 * Assembled for the weight |(D F^{-1} (1,s))_1| alone; the |V| ratio is the
 * coboundary h(y)/h(F^{-1} y), h = |V|, so L = h L_0 h^{-1} and the spectra agree.
 * Column index = mode_index * M + p.
 */
struct GalerkinMatrix {
  Eigen::SparseMatrix<cplx> L0;
  std::vector<Mode> modes;
  int K = 0, M = 0;
  SlopeBracket bracket;
  std::vector<cplx> inv_h;  ///< Fourier coefficients of 1/h on the mode box shifted by 2
  int inv_h_radius = 0;
};

GalerkinMatrix galerkin_matrix(const ExtMapSpec& e, const VectorField& vf, int K, int M,
                               const GalerkinOptions& opt = {});

struct EigenPair {
  cplx value;
  Eigen::VectorXcd right;
  Eigen::VectorXcd left;  ///< normalized so left . right = 1
};

/**
 * @brief Eigen-data with |value| >= cutoff.
 *
 * Strongly connected components of the mode graph give a block-triangular
 * form; each diagonal block is solved densely up to dense_cap and by
 * restarted Arnoldi above it. Arnoldi pairs whose residual stays above 1e-8
 * are dropped. Eigenvectors are completed by block substitution.
 */
std::vector<EigenPair> galerkin_eigs(const GalerkinMatrix& G, double cutoff,
                                     const GalerkinOptions& opt = {});

/// Runs (K, M) and (K + 8, M + 8), keeps eigenvalues agreeing within rel_stable.
SpectralResult galerkin_spectrum(const ExtMapSpec& e, const VectorField& vf, double h_top,
                                 const GalerkinOptions& opt = {}, double cutoff = 0.05,
                                 double rel_stable = 1e-6);

/// Pushforwards of left eigenvectors against lifted observables, deduplicated by numerical rank.
std::vector<ObstructionFunctional> obstruction_functionals(const GalerkinMatrix& G,
                                                           const std::vector<EigenPair>& eig,
                                                           double rank_tol = 1e-8);

/// Fourier energy of the right eigenvector outside mode (0, 0), relative (L_0 coefficients).
double off_zero_energy(const GalerkinMatrix& G, const EigenPair& p);

}  // namespace renorm
