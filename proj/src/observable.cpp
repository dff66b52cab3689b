#include "renorm/observable.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>

namespace renorm {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Observable& Observable::add(Mode k, cplx c) {
  if (k.first == 0 && k.second == 0) {
    c_[k] += cplx(c.real(), 0.0);
    return *this;
  }
  c_[k] += c;
  c_[{-k.first, -k.second}] += std::conj(c);
  return *this;
}

Observable Observable::constant(double c) { return Observable().add({0, 0}, c); }

Observable Observable::cosine(Mode k, double a) { return Observable().add(k, 0.5 * a); }

Observable Observable::sine(Mode k, double a) { return Observable().add(k, cplx(0.0, -0.5 * a)); }

double Observable::operator()(const Vec2& x) const {
  double v = 0.0;
  for (const auto& [k, c] : c_) {
    if (k.first == 0 && k.second == 0) {
      v += c.real();
      continue;
    }
    const double ph = kTwoPi * (k.first * x[0] + k.second * x[1]);
    if (c.real() != 0.0) v += c.real() * std::cos(ph);
    if (c.imag() != 0.0) v -= c.imag() * std::sin(ph);
  }
  return v;
}

Vec2 Observable::gradient(const Vec2& x) const {
  Vec2 g = Vec2::Zero();
  for (const auto& [k, c] : c_) {
    const double ph = kTwoPi * (k.first * x[0] + k.second * x[1]);
    // d/dph Re(c e^{i ph}) = -Re(c) sin ph - Im(c) cos ph
    const double d = -c.real() * std::sin(ph) - c.imag() * std::cos(ph);
    g += kTwoPi * d * Vec2(k.first, k.second);
  }
  return g;
}

double Observable::mean() const { return coeff({0, 0}).real(); }

cplx Observable::coeff(Mode k) const {
  const auto it = c_.find(k);
  return it == c_.end() ? cplx(0.0) : it->second;
}

int Observable::degree() const {
  int d = 0;
  for (const auto& [k, c] : c_) d = std::max({d, std::abs(k.first), std::abs(k.second)});
  return d;
}

double Observable::sup_bound() const {
  double s = 0.0;
  for (const auto& [k, c] : c_) s += std::abs(c);
  return s;
}

Observable Observable::operator+(const Observable& o) const {
  Observable r = *this;
  for (const auto& [k, c] : o.c_) r.c_[k] += c;
  return r;
}

Observable Observable::operator*(double a) const {
  Observable r = *this;
  for (auto& [k, c] : r.c_) c *= a;
  return r;
}

Observable Observable::without_mean() const {
  Observable r = *this;
  r.c_.erase({0, 0});
  return r;
}

}  // namespace renorm
