#include "renorm/extension.hpp"

#include "renorm/errors.hpp"
#include "renorm/parallel.hpp"

#include <cmath>
#include <numbers>

namespace renorm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec2 wrap(const Vec2& z) { return {wrap01(z[0]), wrap01(z[1])}; }

// D_y F^{-1} (1, s) given J = D_x F at x = F^{-1} y (det J = 1).
Vec2 pulled_direction(const Mat2& J, double s) {
  return {J(1, 1) - J(0, 1) * s, -J(1, 0) + J(0, 0) * s};
}

}  // namespace

ExtMapSpec::ExtMapSpec(MapSpec base, FiberNorm norm)
    : base_(std::move(base)), bracket_(stable_slope_bracket(base_)), norm_(norm) {}

ExtMapSpec::ExtMapSpec(MapSpec base, SlopeBracket bracket, FiberNorm norm)
    : base_(std::move(base)), bracket_(bracket), norm_(norm) {
  if (!(bracket_.lo < bracket_.hi) || bracket_.hi >= 0.0)
    throw InvalidSpec("slope bracket must satisfy lo < hi < 0");
}

double ExtMapSpec::slope_forward(const Vec2& x, double s) const {
  const Mat2 J = base_.jacobian_lift(x);
  return (J(1, 0) + J(1, 1) * s) / (J(0, 0) + J(0, 1) * s);
}

double ExtMapSpec::slope_backward(const Vec2& y, double s, double* first) const {
  const Vec2 w = pulled_direction(base_.jacobian_lift(base_.invert_lift(y)), s);
  if (first) *first = w[0];
  return w[1] / w[0];
}

double ExtMapSpec::vector_norm(const Vec2& v) const {
  return norm_ == FiberNorm::Chart ? std::abs(v[0]) : v.norm();
}

double ExtMapSpec::direction_weight(const Vec2& y, double s) const {
  const Vec2 w = pulled_direction(base_.jacobian_lift(base_.invert_lift(y)), s);
  return vector_norm(w) / vector_norm(Vec2(1.0, s));
}

ExtPoint ext_map(const ExtMapSpec& e, const ExtPoint& q) {
  const double s = e.slope_forward(q.x, q.s);
  if (!e.in_bracket(s)) throw ConeExit("forward slope " + std::to_string(s) + " left the bracket");
  return {wrap(e.base().apply_lift(q.x)), s};
}

ExtPoint ext_map_inverse(const ExtMapSpec& e, const ExtPoint& q) {
  const Vec2 x = e.base().invert_lift(wrap(q.x));
  const Vec2 w = pulled_direction(e.base().jacobian_lift(x), q.s);
  const double s = w[1] / w[0];
  if (!e.in_bracket(s)) throw ConeExit("backward slope " + std::to_string(s) + " left the bracket");
  return {wrap(x), s};
}

double section_slope(const VectorField& vf, const Vec2& x) {
  const Vec2 V = vf(x);
  return V[1] / V[0];
}

double transfer_weight(const ExtMapSpec& e, const VectorField& vf, const Vec2& y, double s) {
  const Vec2 x = e.base().invert_lift(wrap(y));
  const Vec2 w = pulled_direction(e.base().jacobian_lift(x), s);
  return e.vector_norm(w) / e.vector_norm(Vec2(1.0, s)) * e.vector_norm(vf(wrap(y))) /
         e.vector_norm(vf(wrap(x)));
}

ExtFunction transfer_pointwise_ext(const ExtMapSpec& e, const VectorField& vf, ExtFunction f,
                                   int n) {
  if (n < 0) throw InvalidSpec("transfer power must be >= 0");
  return [&e, &vf, f = std::move(f), n](const Vec2& y0, double s0) {
    ExtPoint q{wrap(y0), s0};
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      w *= e.direction_weight(q.x, q.s);
      q = ext_map_inverse(e, q);
    }
    // The |V| ratios telescope along the backward orbit.
    if (n > 0) w *= e.vector_norm(vf(wrap(y0))) / e.vector_norm(vf(q.x));
    return w * f(q.x, q.s);
  };
}

OmegaGrid::OmegaGrid(SlopeBracket bracket, int nx, int ns) : br_(bracket), nx_(nx), ns_(ns) {
  if (nx < 2 || ns < 2) throw InvalidSpec("OmegaGrid needs nx, ns >= 2");
  s_.resize(std::size_t(ns));
  bary_.resize(std::size_t(ns));
  for (int k = 0; k < ns; ++k) {
    s_[std::size_t(k)] = br_.mid() + 0.5 * br_.width() * std::cos(std::numbers::pi * k / (ns - 1));
    bary_[std::size_t(k)] = ((k % 2) ? -1.0 : 1.0) * ((k == 0 || k == ns - 1) ? 0.5 : 1.0);
  }
  values_.assign(std::size_t(nx) * std::size_t(nx) * std::size_t(ns), 0.0);
}

void OmegaGrid::fill(const ExtFunction& f) {
  parallel_for(std::size_t(nx_) * std::size_t(nx_), [&](std::size_t ij) {
    const int i = int(ij / std::size_t(nx_)), j = int(ij % std::size_t(nx_));
    for (int k = 0; k < ns_; ++k) values_[index(i, j, k)] = f(x_at(i, j), s_at(k));
  });
  commit();
}

void OmegaGrid::commit() {
  // Separable DFT: rows then columns, for every s node.
  const std::size_t n = std::size_t(nx_);
  std::vector<cplx> tw(n);
  for (std::size_t p = 0; p < n; ++p) tw[p] = std::polar(1.0, -kTwoPi * double(p) / double(n));
  std::vector<cplx> tmp(values_.size());
  coef_.assign(values_.size(), cplx(0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t j = 0; j < n; ++j) {
        const cplx w = tw[(q * j) % n];
        for (int k = 0; k < ns_; ++k)
          tmp[index(int(i), int(q), k)] += w * values_[index(int(i), int(j), k)];
      }
  const double scale = 1.0 / double(n * n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t i = 0; i < n; ++i) {
      const cplx w = tw[(p * i) % n] * scale;
      for (std::size_t q = 0; q < n; ++q)
        for (int k = 0; k < ns_; ++k)
          coef_[index(int(p), int(q), k)] += w * tmp[index(int(i), int(q), k)];
    }
  dirty_ = false;
}

double OmegaGrid::interpolate(const Vec2& x, double s) const {
  if (dirty_) throw InvalidSpec("OmegaGrid samples changed since commit()");
  // Barycentric Chebyshev weights at s.
  std::vector<double> ell(std::size_t(ns_), 0.0);
  {
    double denom = 0.0;
    int hit = -1;
    for (int k = 0; k < ns_; ++k) {
      const double d = s - s_[std::size_t(k)];
      if (d == 0.0) {
        hit = k;
        break;
      }
      ell[std::size_t(k)] = bary_[std::size_t(k)] / d;
      denom += ell[std::size_t(k)];
    }
    if (hit >= 0) {
      std::fill(ell.begin(), ell.end(), 0.0);
      ell[std::size_t(hit)] = 1.0;
    } else {
      for (double& v : ell) v /= denom;
    }
  }
  const int n = nx_;
  auto basis = [n](double t) {
    std::vector<cplx> b(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p) {
      if (2 * p == n) {
        b[std::size_t(p)] = std::cos(std::numbers::pi * n * t);
      } else {
        const int f = (2 * p < n) ? p : p - n;
        b[std::size_t(p)] = std::polar(1.0, kTwoPi * f * t);
      }
    }
    return b;
  };
  const auto b1 = basis(x[0]), b2 = basis(x[1]);
  cplx acc = 0.0;
  for (int p = 0; p < n; ++p) {
    cplx row = 0.0;
    for (int q = 0; q < n; ++q) {
      cplx c = 0.0;
      const std::size_t base = index(p, q, 0);
      for (int k = 0; k < ns_; ++k) c += ell[std::size_t(k)] * coef_[base + std::size_t(k)];
      row += c * b2[std::size_t(q)];
    }
    acc += row * b1[std::size_t(p)];
  }
  return acc.real();
}

OmegaGrid transfer_apply(const ExtMapSpec& e, const VectorField& vf, const OmegaGrid& f) {
  OmegaGrid src = f;
  src.commit();
  OmegaGrid out(f.bracket(), f.nx(), f.ns());
  const int nx = f.nx();
  double* dst = out.values().data();
  parallel_for(std::size_t(nx) * std::size_t(nx), [&](std::size_t ij) {
    const int i = int(ij / std::size_t(nx)), j = int(ij % std::size_t(nx));
    const Vec2 y = out.x_at(i, j);
    const Vec2 x = e.base().invert_lift(y);
    const Mat2 J = e.base().jacobian_lift(x);
    const double vratio = e.vector_norm(vf(y)) / e.vector_norm(vf(wrap(x)));
    for (int k = 0; k < f.ns(); ++k) {
      const double s = out.s_at(k);
      const Vec2 w = pulled_direction(J, s);
      const double sp = w[1] / w[0];
      if (!e.in_bracket(sp)) throw ConeExit("backward slope left the bracket");
      const double weight = e.vector_norm(w) / e.vector_norm(Vec2(1.0, s)) * vratio;
      dst[(std::size_t(i) * std::size_t(nx) + std::size_t(j)) * std::size_t(f.ns()) +
                   std::size_t(k)] = weight * src.interpolate(wrap(x), sp);
    }
  });
  out.commit();
  return out;
}

namespace {

double nu_bar(const IMat2& A) {
  const double tr = double(A(0, 0) + A(1, 1));
  const double det = double(A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0));
  const double disc = tr * tr / 4.0 - det;
  if (disc <= 0.0) throw InvalidSpec("A is not hyperbolic");
  return std::abs(tr / 2.0 - std::copysign(std::sqrt(disc), tr));
}

}  // namespace

std::vector<double> analytic_linear_spectrum(const IMat2& A, int k_max) {
  const double nb = nu_bar(A);
  std::vector<double> out;
  for (int k = 0; k <= k_max; ++k) out.push_back(std::pow(nb, 2 * k - 1));
  return out;
}

double analytic_eigenfunction(const IMat2& A, int k, double s, int K_trunc) {
  if (k < 0 || K_trunc < 1) throw InvalidSpec("analytic_eigenfunction needs k >= 0, K_trunc >= 1");
  const double a = double(A(0, 0)), b = double(A(0, 1)), c = double(A(1, 0)), d = double(A(1, 1));
  const Vec2 es = linear_stable_direction(A);
  const double sbar = es[1] / es[0];
  const double mu = std::pow(nu_bar(A), 2 * k - 1);
  const double db = d - b * sbar;
  double prod = 1.0, sj = s;
  for (int j = 0; j < K_trunc; ++j) {
    const double dj = d - b * sj;
    prod *= dj * std::pow(1.0 / (dj * db), k) / mu;
    sj = (a * sj - c) / dj;
  }
  return std::pow(s - sbar, k) * prod;
}

}  // namespace renorm
