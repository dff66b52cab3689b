#pragma once

#include "renorm/observable.hpp"
#include "renorm/ode.hpp"
#include "renorm/torus.hpp"

#include <utility>
#include <vector>

namespace renorm {

struct VectorFieldSpec {
  MapSpec map = MapSpec::cat(0.0);
  Observable norm = Observable::constant(1.0);  ///< N(x) > 0
  int orientation = 1;                          ///< +1 or -1
};

/**
 * @brief V(x) = orientation * N(x) * e(x) with e the unit stable direction.
 *
 * e is the pull-back of the linear stable eigenvector from depth d, with d
 * calibrated once so the truncation is below rounding. For fixed d the field
 * is an explicit smooth composition, so its derivative and the derivative of
 * nu_n are taken exactly by forward-mode differentiation of the same chain.
 */
class VectorField {
 public:
  /// Throws InvalidSpec if N <= 0 somewhere on a 64x64 grid or orientation is not +-1.
  explicit VectorField(VectorFieldSpec spec, int depth = -1);

  const VectorFieldSpec& spec() const { return spec_; }
  const MapSpec& map() const { return spec_.map; }
  int depth() const { return depth_; }
  /// Linear map with constant N: V is a constant vector.
  bool is_constant() const { return constant_; }
  bool has_constant_direction() const { return spec_.map.is_linear(); }

  Vec2 direction(const Vec2& x) const;
  double norm(const Vec2& x) const { return spec_.norm(x); }
  Vec2 operator()(const Vec2& x) const;
  /// Exact derivative of the depth-d field.
  Mat2 derivative(const Vec2& x) const;
  /// Central differences of V in the {V, V-perp} frame.
  Mat2 derivative_fd(const Vec2& x, double h = 1e-6) const;

  /// nu_n(x) from D_x F^n V(x) = nu_n(x) V(F^n x); throws SignError if nu_n <= 0.
  double nu(const Vec2& x, int n) const;
  /// nu_0(x), ..., nu_{n_max}(x) from one chain; optionally V(x) from the same chain.
  std::vector<double> nu_levels(const Vec2& x, int n_max, Vec2* field = nullptr) const;
  /// nu_n and its gradient in x.
  std::pair<double, Vec2> nu_jet(const Vec2& x, int n) const;
  /// w_n(y) = 1 / nu_n(F^{-n} y).
  double inverse_weight(const Vec2& y, int n) const;

 private:
  VectorFieldSpec spec_;
  int depth_ = 1;
  bool constant_ = false;
  Vec2 e0_;
};

/// V at p using the adaptive-depth stable direction.
Vec2 eval_V(const VectorFieldSpec& vf, const TorusPoint& p);

/// Dense-output solution of x' = V(x) on the lift, optionally with D_x phi_t.
class Trajectory {
 public:
  Vec2 start() const { return x0_; }
  double t_end() const { return t1_; }
  bool has_jacobian() const { return jac_; }
  Vec2 position(double t) const;
  TorusPoint point(double t) const { return TorusPoint::from_lift(position(t)); }
  Mat2 jacobian(double t) const;
  std::vector<double> nodes() const;

 private:
  friend Trajectory trace(const VectorField&, const Vec2&, double, bool, double);
  friend Trajectory trace_on_nodes(const VectorField&, const Vec2&,
                                   const std::vector<double>&, bool);
  Vec2 x0_ = Vec2::Zero();
  Vec2 vel_ = Vec2::Zero();
  double t1_ = 0.0;
  bool exact_ = false;
  bool jac_ = false;
  DenseTrajectory<2> p_;
  DenseTrajectory<6> pj_;
};

/// Integrates from x over [0, t] (t may be negative); local error <= tol.
Trajectory trace(const VectorField& vf, const Vec2& x, double t, bool with_jacobian = false,
                 double tol = 1e-10);
/// Re-integrates on a prescribed step sequence (no error control).
Trajectory trace_on_nodes(const VectorField& vf, const Vec2& x, const std::vector<double>& nodes,
                          bool with_jacobian = false);

TorusPoint flow(const VectorField& vf, const TorusPoint& p, double t, double tol = 1e-10);
std::pair<TorusPoint, Mat2> flow_with_jacobian(const VectorField& vf, const TorusPoint& p, double t,
                                               double tol = 1e-10);

/**
 * @brief Renormalization data at x for the n-th iterate over t in [0, t_max].
 *
 * tau_n(x,t) is integrated jointly with the trajectory, and its gradient with
 * the variational equation: grad tau_n(x,t) = int_0^t (D_x phi_s)^T grad nu_n(phi_s x) ds.
 */
class Cocycle {
 public:
  Cocycle(const VectorField& vf, const Vec2& x, int n, double t_max, double tol = 1e-10);

  int n() const { return n_; }
  Vec2 base() const { return x_; }
  /// F^n x on the lift.
  Vec2 image() const { return fx_; }
  double t_max() const { return t_max_; }
  double nu() const { return nu_; }
  double tau(double t) const;
  /// Solves tau_n(x, t) = s for t in [0, t_max]; s may not exceed tau(t_max).
  double tau_inverse(double s) const;
  Vec2 grad_tau(double t) const;
  Vec2 position(double t) const;
  Mat2 flow_jacobian(double t) const;
  /// A_{x,t,n} = 1 + nu_n^{-1} V(x) (x) grad tau_n(x, tau_n^{-1}(x,t)).
  Mat2 A_matrix(double s) const;
  /// Theta_{x,n}(s) = D_x F^n A_{x,s,n}.
  Mat2 theta(double s) const;

 private:
  const VectorField* vf_;
  Vec2 x_, fx_;
  int n_;
  double t_max_;
  double nu_;
  Mat2 dfn_;
  bool exact_ = false;
  DenseTrajectory<9> traj_;
};

/// grad tau_n(x, t) by central differences with step h, both sides
/// re-integrated on the central trajectory's step sequence.
Vec2 grad_tau_fd(const VectorField& vf, const Vec2& x, int n, double t, double h = 1e-5);

/// tau_n^{-1}(x, 1) computed as int_0^1 w_n(phi_s(F^n x)) ds.
double unit_preimage_time(const VectorField& vf, const Vec2& x, int n, double tol = 1e-10);

struct RotationResult {
  double rho = 0.0;       ///< in [0, 1)
  double residual = 0.0;  ///< min over k in [-5, 5] of |b w^2 + (a-d) w - c|, w = rho + k
  int best_shift = 0;
};

/// Residual of the quadratic b w^2 + (a-d) w - c at w = rho + k, minimized over k.
RotationResult diophantine_residual(const IMat2& A, double rho);

/**
 * Rotation number of the return map to {x_axis = 0} over n_returns returns.
 * Throws TransversalityFailure unless |V_axis| > 0.1 along the section.
 */
RotationResult rotation_number(const VectorField& vf, int section_axis, int n_returns,
                               double tol = 1e-10);

}  // namespace renorm
