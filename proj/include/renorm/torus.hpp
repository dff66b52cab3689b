#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <vector>

namespace renorm {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using IMat2 = Eigen::Matrix<std::int64_t, 2, 2>;

/// Reduce a real number to [0, 1).
double wrap01(double v);

/// A point of T^2 = R^2/Z^2 stored by its canonical representative in [0,1)^2.
struct TorusPoint {
  double x1 = 0.0;
  double x2 = 0.0;

  TorusPoint() = default;
  TorusPoint(double a, double b) : x1(wrap01(a)), x2(wrap01(b)) {}
  static TorusPoint from_lift(const Vec2& z) { return {z[0], z[1]}; }
  Vec2 vec() const { return {x1, x2}; }
};

/// Minimum over integer shifts of the Euclidean distance.
double torus_distance(const TorusPoint& a, const TorusPoint& b);
double torus_distance(const Vec2& a, const Vec2& b);

enum class Variant { Linear, StandardFamily };

/**
 * @brief Area-preserving Anosov map F = A o G of the torus.
 *
 * G(x, y) = (x, y - alpha/(2 pi) sin 2 pi x) is a shear with unit determinant,
 * so D F = A D G has determinant one for every alpha. With A = [[2,1],[1,1]]
 * this is the standard perturbed cat-map family. All evaluations act on R^2
 * lifts; callers canonicalize at API boundaries.
 */
class MapSpec {
 public:
  /// Throws InvalidSpec unless det A = 1, trace A > 2, 0 <= alpha < 1, and
  /// the Linear variant has alpha = 0.
  MapSpec(const IMat2& A, double alpha, Variant variant);

  /// The family built on A = [[2,1],[1,1]].
  static MapSpec cat(double alpha);

  const IMat2& A() const { return A_; }
  const Mat2& A_real() const { return Ar_; }
  const Mat2& A_inv_real() const { return Ainv_; }
  double alpha() const { return alpha_; }
  Variant variant() const { return variant_; }
  /// True when the map is exactly the automorphism x -> Ax.
  bool is_linear() const { return alpha_ == 0.0; }
  MapSpec with_alpha(double alpha) const;

  Vec2 apply_lift(const Vec2& z) const;
  Mat2 jacobian_lift(const Vec2& z) const;
  /// Newton on the lift seeded from A^{-1} q; throws NonConvergence after 50 steps.
  Vec2 invert_lift(const Vec2& q) const;

 private:
  IMat2 A_;
  Mat2 Ar_, Ainv_;
  double alpha_;
  Variant variant_;
};

TorusPoint apply_map(const MapSpec& spec, const TorusPoint& p);
Mat2 jacobian(const MapSpec& spec, const TorusPoint& p);
TorusPoint invert_map(const MapSpec& spec, const TorusPoint& q);

/// F^n(p) for n >= 0 and F^{-|n|}(p) for n < 0; canonicalized after each step.
TorusPoint iterate(const MapSpec& spec, const TorusPoint& p, int n);
/// D_p F^n for n >= 0, D_p F^{-|n|} for n < 0.
Mat2 jacobian_power(const MapSpec& spec, const TorusPoint& p, int n);

/// Unit eigenvector of A for its eigenvalue of modulus < 1, first component > 0.
Vec2 linear_stable_direction(const IMat2& A);
Vec2 linear_unstable_direction(const IMat2& A);

/// Pull back the linear stable direction from F^depth p along the forward orbit.
Vec2 stable_direction(const MapSpec& spec, const TorusPoint& p, int depth);
/// Adaptive depth: stops when successive directions differ by < 1e-12 or
/// depth reaches 60; throws ConeDegeneracy if still moving at depth 60.
Vec2 stable_direction(const MapSpec& spec, const TorusPoint& p);
/// Push forward along the backward orbit (same conventions).
Vec2 unstable_direction(const MapSpec& spec, const TorusPoint& p, int depth);

/// Smallest depth at which stable_direction settles below `tol` on an 8x8
/// sample grid, plus a safety margin of two. Throws ConeDegeneracy above 60.
int calibrate_stable_depth(const MapSpec& spec, double tol = 1e-15);

/// Slope chart bracket [s_lo, s_hi] (s < 0) mapped into itself by D F^{-1}.
struct SlopeBracket {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
};

/// Slope of D_x F^{-1} (1, s); x is the point where F^{-1} is applied.
double inverse_slope_action(const MapSpec& spec, const Vec2& x, double s);

/// Bracket of the linear stable slope iterated under the projectivized
/// inverse until invariant on a sample grid, then padded by 10% per side.
SlopeBracket stable_slope_bracket(const MapSpec& spec);

/// Checks that D F^{-1} maps the bracket strictly inside itself at `samples`
/// seeded pseudo-random points; returns the smallest inward margin (< 0 on failure).
double cone_invariance_margin(const MapSpec& spec, const SlopeBracket& b, int samples,
                              std::uint64_t seed = 1);

struct PeriodicOrbit {
  int period = 0;
  std::vector<TorusPoint> points;  ///< x, F x, ..., F^{n-1} x
  Mat2 multiplier;                 ///< D_x F^n
  std::array<std::int64_t, 2> lift_class{0, 0};  ///< F^n(x) - x on the lift
};

/**
 * @brief One entry per point of Fix F^n.
 *
 * alpha = 0 enumerates Z^2 / (A^n - I) Z^2 exactly; alpha > 0 continues each
 * linear point in alpha (step 0.05, halved on Newton failure, floor 1e-4,
 * ContinuationFailure below) and drops duplicates closer than 1e-8.
 */
std::vector<PeriodicOrbit> periodic_points(const MapSpec& spec, int n);

/// |det(A^n - I)| = number of fixed points of F^n.
std::int64_t fixed_point_count(const IMat2& A, int n);

double topological_entropy(const MapSpec& spec);

/// Precomputed stable directions with bilinear interpolation of the angle.
class DirectionGrid {
 public:
  DirectionGrid(const MapSpec& spec, int n = 512, int depth = -1);
  Vec2 operator()(const TorusPoint& p) const;
  int size() const { return n_; }

 private:
  int n_;
  std::vector<double> theta_;
};

}  // namespace renorm
