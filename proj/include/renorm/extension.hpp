#pragma once

#include "renorm/flow.hpp"
#include "renorm/torus.hpp"

#include <complex>
#include <functional>
#include <vector>

namespace renorm {

/// Point of the projectivized extension: base point and slope s of the direction (1, s).
struct ExtPoint {
  Vec2 x;
  double s = 0.0;
};

/**
 * @brief Norm used for directions and for V in the transfer weight.
 *
 * Chart is |v_1|, which makes the linear weight exactly d - b s. Euclidean
 * differs from it by the coboundary h(s') / h(s), h(s) = sqrt(1 + s^2), so
 * traces and spectra agree.
 */
enum class FiberNorm { Chart, Euclidean };

class ExtMapSpec {
 public:
  explicit ExtMapSpec(MapSpec base, FiberNorm norm = FiberNorm::Chart);
  ExtMapSpec(MapSpec base, SlopeBracket bracket, FiberNorm norm = FiberNorm::Chart);

  const MapSpec& base() const { return base_; }
  const SlopeBracket& bracket() const { return bracket_; }
  FiberNorm fiber_norm() const { return norm_; }
  bool in_bracket(double s) const { return s >= bracket_.lo && s <= bracket_.hi; }

  /// Slope of D_x F (1, s) at base point x.
  double slope_forward(const Vec2& x, double s) const;
  /// Slope of D_y F^{-1} (1, s) at base point y; also the first component of that vector.
  double slope_backward(const Vec2& y, double s, double* first = nullptr) const;
  /// |D_y F^{-1} v| / |v| for v = (1, s) in the chosen norm.
  double direction_weight(const Vec2& y, double s) const;
  /// Norm of a base vector in the chosen norm.
  double vector_norm(const Vec2& v) const;

 private:
  MapSpec base_;
  SlopeBracket bracket_;
  FiberNorm norm_;
};

/// Throws ConeExit when the image slope leaves the bracket.
ExtPoint ext_map(const ExtMapSpec& e, const ExtPoint& q);
ExtPoint ext_map_inverse(const ExtMapSpec& e, const ExtPoint& q);

/// Slope of V-hat(x).
double section_slope(const VectorField& vf, const Vec2& x);

/// w(y, s) = |D_y F^{-1} v| |V(y)| / |V(F^{-1} y)|.
double transfer_weight(const ExtMapSpec& e, const VectorField& vf, const Vec2& y, double s);

/// Function on Omega in (x, s) coordinates.
using ExtFunction = std::function<double(const Vec2&, double)>;

/// (L^n f)(y, s) evaluated pointwise by pulling back n times.
ExtFunction transfer_pointwise_ext(const ExtMapSpec& e, const VectorField& vf, ExtFunction f,
                                   int n);

/**
 * @brief Samples on an nx x nx uniform grid in x times ns Chebyshev points in s.
 *
 * Off-grid values use trigonometric interpolation in x and barycentric
 * Chebyshev interpolation in s.
 */
class OmegaGrid {
 public:
  OmegaGrid(SlopeBracket bracket, int nx, int ns);

  int nx() const { return nx_; }
  int ns() const { return ns_; }
  const SlopeBracket& bracket() const { return br_; }
  std::size_t size() const { return values_.size(); }
  Vec2 x_at(int i, int j) const { return {double(i) / nx_, double(j) / nx_}; }
  double s_at(int k) const { return s_[std::size_t(k)]; }
  double& at(int i, int j, int k) {
    dirty_ = true;
    return values_[index(i, j, k)];
  }
  double at(int i, int j, int k) const { return values_[index(i, j, k)]; }
  std::vector<double>& values() {
    dirty_ = true;
    return values_;
  }
  const std::vector<double>& values() const { return values_; }

  void fill(const ExtFunction& f);
  /// Recomputes interpolation coefficients; required after editing samples.
  void commit();
  /// Interpolated value; throws InvalidSpec if samples changed since commit().
  double interpolate(const Vec2& x, double s) const;

 private:
  std::size_t index(int i, int j, int k) const {
    return (std::size_t(i) * std::size_t(nx_) + std::size_t(j)) * std::size_t(ns_) + std::size_t(k);
  }

  SlopeBracket br_;
  int nx_, ns_;
  std::vector<double> s_;
  std::vector<double> values_;
  std::vector<double> bary_;                 // barycentric weights of the s nodes
  std::vector<std::complex<double>> coef_;  // 2D DFT per s node, (kx, ky, k)
  bool dirty_ = true;
};

/// L applied to grid samples: pull back through the extended inverse, interpolate, weight.
OmegaGrid transfer_apply(const ExtMapSpec& e, const VectorField& vf, const OmegaGrid& f);

/// {nu_bar^{2k-1}}, k = 0..k_max.
std::vector<double> analytic_linear_spectrum(const IMat2& A, int k_max);

/**
 * @brief Linear-case eigenfunction f_k(s) = (s - s_bar)^k M_k(s), M_k(s_bar) = 1.
 *
 * M_k is the truncated product over j < K_trunc of mu^{-1} (d - b psi^{-j}(s)) r(psi^{-j}(s))^k,
 * with r the difference quotient of psi^{-1} at s_bar and mu = nu_bar^{2k-1}.
 */
double analytic_eigenfunction(const IMat2& A, int k, double s, int K_trunc = 200);

}  // namespace renorm
