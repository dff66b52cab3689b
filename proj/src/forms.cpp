#include "renorm/forms.hpp"

#include "renorm/errors.hpp"
#include "renorm/functionals.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace renorm {

namespace {

Vec2 wrap(const Vec2& z) { return {wrap01(z[0]), wrap01(z[1])}; }

template <class F>
double gk(F&& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, tol);
}

// One backward step of the extension carrying a base tangent vector u.
struct BackStep {
  ExtPoint q;
  Vec2 u;
  double weight;  // direction weight only
};

BackStep back_step(const ExtMapSpec& e, const ExtPoint& q, const Vec2& u) {
  const Vec2 x = e.base().invert_lift(wrap(q.x));
  const Mat2 J = e.base().jacobian_lift(x);
  const Vec2 w(J(1, 1) - J(0, 1) * q.s, -J(1, 0) + J(0, 0) * q.s);
  const double s = w[1] / w[0];
  if (!e.in_bracket(s)) throw ConeExit("backward slope left the bracket");
  const Vec2 pu(J(1, 1) * u[0] - J(0, 1) * u[1], -J(1, 0) * u[0] + J(0, 0) * u[1]);
  return {{wrap(x), s}, pu, e.vector_norm(w) / e.vector_norm(Vec2(1.0, q.s))};
}

}  // namespace

OneForm lift_differential(const Observable& g) {
  return [g](const Vec2& x, double, const Vec2& u) { return g.gradient(x).dot(u); };
}

double one_form_transfer(const ExtMapSpec& e, const VectorField& vf, const OneForm& gamma,
                         const ExtPoint& q, const Vec2& u) {
  const BackStep b = back_step(e, q, u);
  const double vr = e.vector_norm(vf(wrap(q.x))) / e.vector_norm(vf(b.q.x));
  return b.weight * vr * gamma(b.q.x, b.q.s, b.u);
}

OneForm one_form_transfer_power(const ExtMapSpec& e, const VectorField& vf, OneForm gamma, int n) {
  if (n < 0) throw InvalidSpec("transfer power must be >= 0");
  return [&e, &vf, gamma = std::move(gamma), n](const Vec2& y, double s, const Vec2& u) {
    BackStep cur{{wrap(y), s}, u, 1.0};
    double W = 1.0;
    for (int i = 0; i < n; ++i) {
      cur = back_step(e, cur.q, cur.u);
      W *= cur.weight;
    }
    if (n > 0) W *= e.vector_norm(vf(wrap(y))) / e.vector_norm(vf(cur.q.x));
    return W * gamma(cur.q.x, cur.q.s, cur.u);
  };
}

double h1_functional(const VectorField& vf, const OneForm& gamma, const Vec2& x,
                     const VectorWindow& w, double s0, double s1, double tol) {
  if (s0 < 0.0 || s1 < s0) throw InvalidSpec("h1_functional needs 0 <= s0 <= s1");
  if (s1 == s0) return 0.0;
  const Trajectory tr = trace(vf, x, s1, true, std::min(1e-12, tol));
  return gk(
      [&](double s) {
        const Vec2 p = wrap(tr.position(s));
        return gamma(p, section_slope(vf, p), tr.jacobian(s) * w(s));
      },
      s0, s1, tol);
}

double IdentityCheck::residual() const { return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)); }

IdentityCheck h1_window_transfer(const ExtMapSpec& e, const VectorField& vf, const OneForm& gamma,
                                 const Vec2& x, int n, const VectorWindow& w, double tol) {
  double t_max = 2.0 / vf.nu(x, n);
  auto C = std::make_unique<Cocycle>(vf, x, n, t_max, std::min(1e-12, tol));
  while (C->tau(t_max) < 1.0) {
    t_max *= 2.0;
    C = std::make_unique<Cocycle>(vf, x, n, t_max, std::min(1e-12, tol));
  }
  const double T1 = C->tau_inverse(1.0);
  IdentityCheck out;
  out.lhs = gk(
      [&](double sp) {
        const double tau = C->tau(sp);
        const Vec2 p = wrap(C->position(sp));
        const Vec2 u = C->flow_jacobian(sp) * C->theta(tau).inverse() * w(tau);
        return gamma(p, section_slope(vf, p), u);
      },
      0.0, T1, tol);
  out.rhs = h1_functional(vf, one_form_transfer_power(e, vf, gamma, n), C->image(), w, 0.0, 1.0, tol);
  return out;
}

IdentityCheck gradient_transfer(const ExtMapSpec& e, const VectorField& vf, const Observable& g,
                                const Vec2& x, const Vec2& v, double t, int n, double tol) {
  IdentityCheck out;
  out.lhs = v.dot(gradient_ergodic_integral(vf, x, t, g, std::min(1e-12, tol)));
  const Cocycle C(vf, x, n, t, std::min(1e-12, tol));
  const VectorWindow w = [&](double s) -> Vec2 { return C.theta(s) * v; };
  out.rhs = h1_functional(vf, one_form_transfer_power(e, vf, lift_differential(g), n), C.image(), w,
                          0.0, C.tau(t), tol);
  return out;
}

double Leaf::length() const {
  return gk([&](double s) { return velocity(s).norm(); }, 0.0, 1.0, 1e-13);
}

Leaf straight_leaf(const Vec2& x0, double slope, double length) {
  const Vec2 d = Vec2(1.0, slope).normalized() * length;
  return {[x0, d](double s) -> Vec2 { return x0 + s * d; }, [d](double) -> Vec2 { return d; }};
}

void validate_leaf(const Leaf& W, const SlopeBracket& bracket, double delta) {
  constexpr int kSamples = 65;
  for (int i = 0; i < kSamples; ++i) {
    const Vec2 v = W.velocity(double(i) / (kSamples - 1));
    if (!(v[0] > 0.0)) throw LeafInvalid("leaf tangent is not oriented with positive first component");
    const double s = v[1] / v[0];
    if (s < bracket.lo || s > bracket.hi) throw LeafInvalid("leaf tangent leaves the stable cone");
  }
  const double L = W.length();
  if (L < 0.5 * delta || L > delta) throw LeafInvalid("leaf length outside [delta/2, delta]");
}

double leaf_pairing(const Leaf& W, const std::function<double(double)>& phi, const ExtFunction& g,
                    double tol) {
  return gk(
      [&](double s) {
        const double f = phi(s);
        if (f == 0.0) return 0.0;
        const Vec2 v = W.velocity(s);
        return f * g(wrap(W.omega(s)), v[1] / v[0]) * v.norm();
      },
      0.0, 1.0, tol);
}

LeafFamily random_stable_leaves(const SlopeBracket& bracket, int count, double delta,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  LeafFamily fam;
  fam.delta = delta;
  for (int i = 0; i < count; ++i) {
    const Vec2 x0(U(rng), U(rng));
    const double s = bracket.lo + U(rng) * bracket.width();
    const double L = delta * (0.5 + 0.5 * U(rng));
    fam.leaves.push_back(straight_leaf(x0, s, L));
  }
  return fam;
}

double sampled_seminorm(const ExtFunction& g, const LeafFamily& family, int q, double tol) {
  if (q < 0) throw InvalidSpec("seminorm order q must be >= 0");
  double sup = 0.0;
  for (int j = 1; j <= 4; ++j) {
    const double k = j * std::numbers::pi;
    double cq = 0.0;
    for (int i = 0; i <= q; ++i) cq += std::pow(k, i);
    const auto phi = [k](double s) { return std::sin(k * s); };
    for (const Leaf& W : family.leaves) sup = std::max(sup, std::abs(leaf_pairing(W, phi, g, tol)) / cq);
  }
  return sup;
}

}  // namespace renorm
