#pragma once

#include "renorm/flow.hpp"
#include "renorm/observable.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace renorm {

/// Real function on the torus lift.
using ScalarField = std::function<double(const Vec2&)>;

inline ScalarField as_field(const Observable& g) {
  return [g](const Vec2& x) { return g(x); };
}

/// S(u) = e^{-1/u} / (e^{-1/u} + e^{-1/(1-u)}) on (0,1), 0 below, 1 above.
double smooth_step(double u);
double smooth_step_derivative(double u);

/// chi = 1 on [0, delta0], S((1-s)/(1-delta0)) on [delta0, 1], 0 after.
class Mollifier {
 public:
  explicit Mollifier(double delta0 = 0.5);
  double delta0() const { return d0_; }
  double operator()(double s) const;
  double derivative(double s) const;

 private:
  double d0_;
};

/// Compactly supported weight phi(t) on [lo, hi].
struct WindowFunction {
  double lo = 0.0;
  double hi = 0.0;
  std::function<double(double)> f;
  /// False for the boundary windows, which may be discontinuous at an end.
  bool compact = true;

  double operator()(double t) const { return (t < lo || t > hi) ? 0.0 : f(t); }
  double length() const { return hi - lo; }
  /// Sampled sup |phi| + sup |phi'| over 512 points.
  double sampled_c1_norm() const;
};

/// H_{x,t}(g) = int_0^t g(phi_s x) ds.
double ergodic_integral(const VectorField& vf, const Vec2& x, double t, const Observable& g,
                        double tol = 1e-10);
double ergodic_integral(const VectorField& vf, const Vec2& x, double t, const ScalarField& g,
                        double tol = 1e-10);

/// H_{x,phi}(g) = int phi(t) g(phi_t x) dt by Gauss-Kronrod on the dense output.
double mollified_functional(const VectorField& vf, const Vec2& x, const WindowFunction& w,
                            const ScalarField& g, double tol = 1e-10);

/// grad_x H_{x,t}(g) = int_0^t (D_x phi_s)^T grad g(phi_s x) ds.
Vec2 gradient_ergodic_integral(const VectorField& vf, const Vec2& x, double t, const Observable& g,
                               double tol = 1e-10);

/// (L^n g)(y) = g(F^{-n} y) w_n(y), the base transfer operator applied pointwise.
ScalarField transfer_pointwise(const VectorField& vf, ScalarField g, int n);

/// Deepest renormalization level tracked by the tau profiles.
inline constexpr int kMaxLevel = 24;

/// tau_n(x, t) for n = 0..levels at each requested t (ascending).
struct TauProfile {
  std::vector<double> t;
  int levels = 0;
  std::vector<std::vector<double>> tau;  ///< tau[i][n], n <= levels
};

/// One flow of length max(t) carrying int nu_n for every level at once.
TauProfile tau_levels(const VectorField& vf, const Vec2& x, const std::vector<double>& ts);

/// n_t at a single point: inf{n : tau_n(x, t) < 1}.
int n_t_pointwise(const VectorField& vf, const Vec2& x, double t);

/**
 * @brief n_T with inf over x taken on a grid x grid lattice.
 *
 * n_T + 1 is the first n with min_x tau_n(x, T) <= 1; n_T = 0 for T <= 1.
 */
int renormalization_depth(const VectorField& vf, double T, int grid = 8);

/// -int_0^T chi(tau_n(x,t)) g(phi_t x) dt with n = n_T.
double renormalized_average(const VectorField& vf, const Observable& g, int n_T,
                            const Mollifier& chi, const Vec2& x, double tol = 1e-10);

/// Batch version on points; the linear constant-field case is evaluated
/// mode-wise with one oscillatory integral per Fourier mode.
std::vector<double> renormalized_average_batch(const VectorField& vf, const Observable& g, int n_T,
                                               const Mollifier& chi, const std::vector<Vec2>& xs,
                                               double tol = 1e-10);

/// grad of the renormalized average: chi' correction term plus the gradient functional.
Vec2 renormalized_average_gradient(const VectorField& vf, const Observable& g, int n_T,
                                   const Mollifier& chi, const Vec2& x, double tol = 1e-10);

struct DecompositionPiece {
  int side = 0;  ///< -1 or +1
  int n = 0;
  Vec2 base;     ///< F^n x on the lift
  WindowFunction window;
};

struct Decomposition {
  int n_t = 0;
  double tau = 0.0;   ///< tau_{n_t}(x, t)
  std::vector<DecompositionPiece> pieces;
  std::vector<DecompositionPiece> boundary;  ///< two windows at n = 0
  int K = 0;          ///< interior pieces on the longer side
  double c_star = 0.0;
};

/**
 * @brief Splits H_{x,t} into windowed functionals of transferred observables.
 *
 * Each side re-windows its edge function by the time change tau_m until
 * the level reaches 0. Throws RecursionStall if a level cannot advance.
 */
Decomposition decompose(const VectorField& vf, const Vec2& x, double t, double delta = 0.05);

/// Sum of all pieces evaluated on g; equals H_{x,t}(g).
double reconstruct(const VectorField& vf, const Decomposition& d, const ScalarField& g,
                   double tol = 1e-10);

struct GrowthFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> t;
  std::vector<double> value;  ///< running sup of |H|, averaged over base points
};

/// Least-squares slope of log y against log t.
double loglog_slope(const std::vector<double>& t, const std::vector<double>& y);

/// Running sup of |H_{x,t}(g)| on geometrically spaced t in [t0, t1].
GrowthFit growth_exponent(const VectorField& vf, const Observable& g, const std::vector<Vec2>& xs,
                          double t0, double t1, int samples = 40);

}  // namespace renorm
