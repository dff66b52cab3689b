#pragma once

// Pull-back of the linear stable direction along a forward orbit, templated on
// the scalar so the same chain yields values (double) and exact first
// derivatives in x (Dual).

#include "renorm/torus.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace renorm::detail {

struct Dual {
  double v = 0.0;
  Vec2 d = Vec2::Zero();

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit lift of constants
  Dual(double value, const Vec2& deriv) : v(value), d(deriv) {}
};

inline Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
inline Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.d * b.v + b.d * a.v}; }
inline Dual operator*(double a, const Dual& b) { return {a * b.v, a * b.d}; }
inline Dual operator/(const Dual& a, const Dual& b) {
  return {a.v / b.v, (a.d * b.v - b.d * a.v) / (b.v * b.v)};
}
inline Dual sqrt(const Dual& a) {
  const double s = std::sqrt(a.v);
  return {s, a.d / (2.0 * s)};
}
inline Dual log(const Dual& a) { return {std::log(a.v), a.d / a.v}; }
inline double sqrt(double a) { return std::sqrt(a); }
inline double log(double a) { return std::log(a); }
inline void sincos2pi(const Dual& a, Dual& s, Dual& c) {
  constexpr double tp = 2.0 * std::numbers::pi;
  const double sv = std::sin(tp * a.v), cv = std::cos(tp * a.v);
  s = {sv, tp * cv * a.d};
  c = {cv, -tp * sv * a.d};
}
inline void sincos2pi(double a, double& s, double& c) {
  constexpr double tp = 2.0 * std::numbers::pi;
  s = std::sin(tp * a);
  c = std::cos(tp * a);
}
inline double value(double a) { return a; }
inline double value(const Dual& a) { return a.v; }
inline Dual wrap(const Dual& a) { return {a.v - std::floor(a.v), a.d}; }
inline double wrap(double a) { return a - std::floor(a); }

template <class T>
struct ChainResult {
  T e1, e2;         ///< unit stable direction at x
  T log_growth;     ///< log |D_x F^n e(x)|; left at 0 when steps are recorded
  T f1, f2;         ///< unit stable direction at F^n x (depth - n)
  T y1, y2;         ///< F^n x, canonical representative
  bool flipped = false;  ///< orientation reversed within the first n steps
};

/// Per-step data for the first n steps: the contraction factors r_i and the orbit points F^i x.
struct ChainSteps {
  std::vector<double> r;
  std::vector<Vec2> orbit;
};

/**
 * Stable direction at (x1, x2) from pulling back u along `depth` forward
 * steps; also the log growth of |D F^n e| for the first n steps (n <= depth).
 */
template <class T>
ChainResult<T> stable_chain(const MapSpec& spec, T x1, T x2, int n, int depth, const Vec2& u,
                            ChainSteps* steps = nullptr) {
  const Mat2& A = spec.A_real();
  const Mat2& Ai = spec.A_inv_real();
  const double k = spec.alpha() / (2.0 * std::numbers::pi);
  const double alpha = spec.alpha();
  thread_local std::vector<T> cs;
  cs.resize(std::size_t(depth));
  T a = wrap(x1), b = wrap(x2);
  ChainResult<T> out;
  for (int i = 0; i < depth; ++i) {
    if (i == n) {
      out.y1 = a;
      out.y2 = b;
    }
    if (steps && i <= n) steps->orbit.emplace_back(value(a), value(b));
    T s, c;
    sincos2pi(a, s, c);
    cs[i] = c;
    const T y2 = b - k * s;
    const T na = A(0, 0) * a + A(0, 1) * y2;
    const T nb = A(1, 0) * a + A(1, 1) * y2;
    a = wrap(na);
    b = wrap(nb);
  }
  T v1 = u[0], v2 = u[1];
  T lg = 0.0;
  if (steps) steps->r.assign(std::size_t(n), 1.0);
  for (int i = depth - 1; i >= 0; --i) {
    // (A G_i)^{-1} v = G_i^{-1} A^{-1} v, G_i^{-1} = [[1,0],[alpha c_i, 1]].
    const T w1 = Ai(0, 0) * v1 + Ai(0, 1) * v2;
    const T w2 = alpha * cs[i] * w1 + (Ai(1, 0) * v1 + Ai(1, 1) * v2);
    const T r = sqrt(w1 * w1 + w2 * w2);
    v1 = w1 / r;
    v2 = w2 / r;
    if (value(v1) < 0.0) {
      v1 = -v1;
      v2 = -v2;
      if (i < n) out.flipped = true;
    }
    if (steps) {
      if (i < n) steps->r[std::size_t(i)] = value(r);
    } else if (i < n) {
      lg = lg - log(r);
    }
    if (i == n) {
      out.f1 = v1;
      out.f2 = v2;
    }
  }
  if (n == 0) {
    out.f1 = v1;
    out.f2 = v2;
  }
  out.e1 = v1;
  out.e2 = v2;
  out.log_growth = lg;
  return out;
}

}  // namespace renorm::detail
