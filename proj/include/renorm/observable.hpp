#pragma once

#include "renorm/torus.hpp"

#include <complex>
#include <map>
#include <utility>

namespace renorm {

using Mode = std::pair<int, int>;
using cplx = std::complex<double>;

/**
 * @brief Real trigonometric polynomial g(x) = sum_k c_k e^{2 pi i k.x}.
 *
 * Coefficients are kept Hermitian (c_{-k} = conj c_k), so evaluation is real.
 */
class Observable {
 public:
  Observable() = default;

  /// Adds c at k and conj(c) at -k; for k = 0 only the real part is kept.
  Observable& add(Mode k, cplx c);

  static Observable constant(double c);
  /// a cos 2 pi k.x
  static Observable cosine(Mode k, double a = 1.0);
  /// a sin 2 pi k.x
  static Observable sine(Mode k, double a = 1.0);

  double operator()(const Vec2& x) const;
  double operator()(const TorusPoint& p) const { return (*this)(p.vec()); }
  Vec2 gradient(const Vec2& x) const;

  double mean() const;
  cplx coeff(Mode k) const;
  const std::map<Mode, cplx>& coeffs() const { return c_; }
  bool empty() const { return c_.empty(); }
  /// max |k|_inf over the support.
  int degree() const;
  /// sum |c_k|, an upper bound for sup |g|.
  double sup_bound() const;

  Observable operator+(const Observable& o) const;
  Observable operator*(double a) const;
  Observable without_mean() const;

 private:
  std::map<Mode, cplx> c_;
};

}  // namespace renorm
