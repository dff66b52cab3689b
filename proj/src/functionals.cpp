#include "renorm/functionals.hpp"

#include "renorm/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace renorm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

// int over [a, b] split into panels no longer than `panel`.
template <class F>
double panel_integral(F&& f, double a, double b, double panel, double tol) {
  if (b <= a) return 0.0;
  const int np = std::max(1, int(std::ceil((b - a) / panel)));
  const double h = (b - a) / np;
  double acc = 0.0;
  for (int i = 0; i < np; ++i) {
    const double lo = a + i * h, hi = (i + 1 == np) ? b : a + (i + 1) * h;
    acc += GK::integrate(f, lo, hi, 10, tol);
  }
  return acc;
}

// int_0^1 by fixed 30-point Gauss on panels of width <= panel; exact enough once each
// panel carries at most a quarter oscillation of a smooth integrand.
template <class F>
double gauss_panels(F&& f, double panel) {
  const int np = std::max(1, int(std::ceil(1.0 / panel)));
  double acc = 0.0;
  for (int i = 0; i < np; ++i)
    acc += boost::math::quadrature::gauss<double, 30>::integrate(f, double(i) / np,
                                                                  double(i + 1) / np);
  return acc;
}

// (e^{2 pi i w t} - 1) / (2 pi i w), with the w -> 0 limit t.
std::complex<double> exp_integral(double w, double t) {
  const double x = kTwoPi * w * t;
  if (std::abs(x) < 1e-6) {
    const std::complex<double> i(0.0, 1.0);
    return t * (1.0 + i * x / 2.0 - x * x / 6.0);
  }
  return (std::exp(std::complex<double>(0.0, x)) - 1.0) / std::complex<double>(0.0, kTwoPi * w);
}

double mode_phase_dot(const Mode& k, const Vec2& v) { return k.first * v[0] + k.second * v[1]; }

}  // namespace

double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

double smooth_step_derivative(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
  const double da = a / (u * u), db = -b / ((1.0 - u) * (1.0 - u));
  return (da * (a + b) - a * (da + db)) / ((a + b) * (a + b));
}

Mollifier::Mollifier(double delta0) : d0_(delta0) {
  if (!(delta0 > 0.0 && delta0 < 1.0)) throw InvalidSpec("mollifier plateau must lie in (0,1)");
}

double Mollifier::operator()(double s) const {
  if (s <= d0_) return 1.0;
  if (s >= 1.0) return 0.0;
  return smooth_step((1.0 - s) / (1.0 - d0_));
}

double Mollifier::derivative(double s) const {
  if (s <= d0_ || s >= 1.0) return 0.0;
  return -smooth_step_derivative((1.0 - s) / (1.0 - d0_)) / (1.0 - d0_);
}

double WindowFunction::sampled_c1_norm() const {
  if (hi <= lo) return 0.0;
  double m0 = 0.0, m1 = 0.0;
  const int n = 512;
  const double h = (hi - lo) / n;
  double prev = (*this)(lo);
  for (int i = 1; i <= n; ++i) {
    const double v = (*this)(lo + i * h);
    m0 = std::max(m0, std::abs(v));
    m1 = std::max(m1, std::abs(v - prev) / h);
    prev = v;
  }
  return m0 + m1;
}

// ---------------------------------------------------------------------------

double ergodic_integral(const VectorField& vf, const Vec2& x, double t, const Observable& g,
                        double tol) {
  if (t < 0.0) throw InvalidSpec("ergodic integral needs t >= 0");
  if (t == 0.0) return 0.0;
  if (vf.is_constant()) {
    const Vec2 V = vf(x);
    std::complex<double> acc = 0.0;
    for (const auto& [k, c] : g.coeffs()) {
      const double ph = kTwoPi * mode_phase_dot(k, x);
      acc += c * std::exp(std::complex<double>(0.0, ph)) * exp_integral(mode_phase_dot(k, V), t);
    }
    return acc.real();
  }
  return ergodic_integral(vf, x, t, as_field(g), tol);
}

double ergodic_integral(const VectorField& vf, const Vec2& x, double t, const ScalarField& g,
                        double tol) {
  if (t < 0.0) throw InvalidSpec("ergodic integral needs t >= 0");
  if (t == 0.0) return 0.0;
  if (vf.is_constant()) {
    const Vec2 V = vf(x);
    return panel_integral([&](double s) { return g(x + s * V); }, 0.0, t, 0.5, tol);
  }
  using S3 = Eigen::Matrix<double, 3, 1>;
  auto rhs = [&](double, const S3& y) {
    const Vec2 p = y.head<2>();
    S3 out;
    out << vf(p), g(p);
    return out;
  };
  S3 y0;
  y0 << x, 0.0;
  const std::array<OdeTolerance, 3> tl{OdeTolerance{tol, 0.0}, OdeTolerance{tol, 0.0},
                                       OdeTolerance{tol, 0.0}};
  return integrate_dopri5<3>(rhs, y0, 0.0, t, tl).back()[2];
}

double mollified_functional(const VectorField& vf, const Vec2& x, const WindowFunction& w,
                            const ScalarField& g, double tol) {
  if (w.hi <= w.lo || !w.f) return 0.0;
  if (w.lo < 0.0) throw InvalidSpec("window support must lie in t >= 0");
  // Position error is amplified by |grad g|, which grows like lambda^n for transferred g.
  const Trajectory tr = trace(vf, x, w.hi, false, std::min(1e-12, tol));
  auto f = [&](double s) {
    const double phi = w(s);
    return phi == 0.0 ? 0.0 : phi * g(tr.position(s));
  };
  return panel_integral(f, w.lo, w.hi, 0.125, tol);
}

Vec2 gradient_ergodic_integral(const VectorField& vf, const Vec2& x, double t, const Observable& g,
                               double tol) {
  if (t < 0.0) throw InvalidSpec("ergodic integral needs t >= 0");
  if (t == 0.0) return Vec2::Zero();
  if (vf.is_constant()) {
    const Vec2 V = vf(x);
    Eigen::Vector2cd acc = Eigen::Vector2cd::Zero();
    for (const auto& [k, c] : g.coeffs()) {
      const double ph = kTwoPi * mode_phase_dot(k, x);
      const std::complex<double> z =
          c * std::exp(std::complex<double>(0.0, ph)) * exp_integral(mode_phase_dot(k, V), t);
      const std::complex<double> i2pi(0.0, kTwoPi);
      acc += i2pi * z * Eigen::Vector2cd(double(k.first), double(k.second));
    }
    return acc.real();
  }
  using S8 = Eigen::Matrix<double, 8, 1>;
  auto rhs = [&](double, const S8& y) {
    const Vec2 p = y.head<2>();
    Mat2 xi;
    xi << y[2], y[4], y[3], y[5];
    const Mat2 d = vf.derivative(p) * xi;
    const Vec2 gg = xi.transpose() * g.gradient(p);
    S8 out;
    out << vf(p), d(0, 0), d(1, 0), d(0, 1), d(1, 1), gg;
    return out;
  };
  S8 y0;
  y0 << x, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0;
  std::array<OdeTolerance, 8> tl;
  tl.fill(OdeTolerance{tol, tol});
  tl[0] = tl[1] = OdeTolerance{tol, 0.0};
  const S8 y1 = integrate_dopri5<8>(rhs, y0, 0.0, t, tl).back();
  return {y1[6], y1[7]};
}

ScalarField transfer_pointwise(const VectorField& vf, ScalarField g, int n) {
  if (n < 0) throw InvalidSpec("transfer power must be >= 0");
  if (n == 0) return g;
  return [&vf, g = std::move(g), n](const Vec2& y) {
    // g and nu are periodic, so work on the canonical representative.
    Vec2 z = TorusPoint(y[0], y[1]).vec();
    for (int i = 0; i < n; ++i) {
      z = vf.map().invert_lift(z);
      z = TorusPoint(z[0], z[1]).vec();
    }
    return g(z) / vf.nu(z, n);
  };
}

// ---------------------------------------------------------------------------

TauProfile tau_levels(const VectorField& vf, const Vec2& x, const std::vector<double>& ts) {
  if (!std::is_sorted(ts.begin(), ts.end()) || (!ts.empty() && ts.front() < 0.0))
    throw InvalidSpec("tau profile times must be ascending and >= 0");
  TauProfile P;
  P.t = ts;
  if (ts.empty()) return P;
  // tau_n(x, t) ~ nu_bar^n t: levels past ln t / h_top + 6 are far below 1.
  const double h = topological_entropy(vf.map());
  const int levels =
      std::min(kMaxLevel, int(std::ceil(std::log(std::max(ts.back(), 1.0)) / h)) + 6);
  P.levels = levels;
  if (vf.is_constant()) {
    const auto nu = vf.nu_levels(x, levels);
    for (double t : ts) {
      std::vector<double> row(std::size_t(levels) + 1);
      for (int n = 0; n <= levels; ++n) row[n] = nu[n] * t;
      P.tau.push_back(std::move(row));
    }
    return P;
  }
  constexpr int L = kMaxLevel + 1;
  using S = Eigen::Matrix<double, 2 + L, 1>;
  auto rhs = [&](double, const S& y) {
    Vec2 v;
    const auto nu = vf.nu_levels(y.head<2>(), levels, &v);
    S o = S::Zero();
    o.head<2>() = v;
    for (int n = 0; n <= levels; ++n) o[2 + n] = nu[n];
    return o;
  };
  // n_t only compares tau_n with 1; relative 1e-7 is ample.
  std::array<OdeTolerance, 2 + L> tl;
  tl.fill(OdeTolerance{1e-12, 1e-7});
  tl[0] = tl[1] = OdeTolerance{1e-7, 0.0};
  S y = S::Zero();
  y.head<2>() = x;
  double t = 0.0;
  // Short legs keep the dense output small; only endpoints are used.
  constexpr double kLeg = 50.0;
  for (double target : ts) {
    while (t < target) {
      const double tn = std::min(target, t + kLeg);
      y = integrate_dopri5<2 + L>(rhs, y, t, tn, tl).back();
      y.head<2>() = TorusPoint(y[0], y[1]).vec();
      t = tn;
    }
    P.tau.emplace_back(y.data() + 2, y.data() + 3 + levels);
  }
  return P;
}

int n_t_pointwise(const VectorField& vf, const Vec2& x, double t) {
  const auto row = tau_levels(vf, x, {t}).tau.front();
  for (std::size_t n = 0; n < row.size(); ++n)
    if (row[n] < 1.0) return int(n);
  throw InvalidSpec("n_t exceeds the tracked levels");
}

int renormalization_depth(const VectorField& vf, double T, int grid) {
  if (T <= 1.0) return 0;
  if (grid < 1) throw InvalidSpec("grid must be >= 1");
  std::vector<double> lo(kMaxLevel + 1, std::numeric_limits<double>::infinity());
  const int g = vf.is_constant() ? 1 : grid;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      const auto row = tau_levels(vf, Vec2(double(i) / g, double(j) / g), {T}).tau.front();
      for (std::size_t n = 0; n < row.size(); ++n) lo[n] = std::min(lo[n], row[n]);
    }
  for (int n = 1; n <= kMaxLevel; ++n)
    if (lo[n] <= 1.0) return n - 1;
  throw InvalidSpec("n_T exceeds the tracked levels");
}

double renormalized_average(const VectorField& vf, const Observable& g, int n_T,
                            const Mollifier& chi, const Vec2& x, double tol) {
  return renormalized_average_batch(vf, g, n_T, chi, {x}, tol).front();
}

std::vector<double> renormalized_average_batch(const VectorField& vf, const Observable& g, int n_T,
                                               const Mollifier& chi, const std::vector<Vec2>& xs,
                                               double tol) {
  std::vector<double> out(xs.size(), 0.0);
  if (g.empty()) return out;
  if (vf.is_constant()) {
    const double nun = vf.nu(Vec2::Zero(), n_T);
    const Vec2 V = vf(Vec2::Zero());
    const double L = 1.0 / nun;
    std::vector<std::pair<Mode, std::complex<double>>> J;
    for (const auto& [k, c] : g.coeffs()) {
      const double w = mode_phase_dot(k, V);
      if (k.second < 0 || (k.second == 0 && k.first < 0)) continue;  // use Hermitian pairs
      // L int_0^1 chi(u) e^{2 pi i w L u} du
      const double Om = kTwoPi * w * L;
      const double panel = std::min(0.25, 1.0 / std::max(1.0, std::abs(Om) / kTwoPi) / 4.0);
      const double re = gauss_panels([&](double u) { return chi(u) * std::cos(Om * u); }, panel);
      const double im = gauss_panels([&](double u) { return chi(u) * std::sin(Om * u); }, panel);
      const double mult = (k.first == 0 && k.second == 0) ? 1.0 : 2.0;
      J.push_back({k, mult * c * L * std::complex<double>(re, im)});
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double acc = 0.0;
      for (const auto& [k, z] : J)
        acc += (z * std::exp(std::complex<double>(0.0, kTwoPi * mode_phase_dot(k, xs[i])))).real();
      out[i] = -acc;
    }
    return out;
  }
  // chi(tau) vanishes once tau >= 1, so legs run until the clock passes 1.
  using S4 = Eigen::Matrix<double, 4, 1>;
  const std::array<OdeTolerance, 4> tl{OdeTolerance{tol, 0.0}, OdeTolerance{tol, 0.0},
                                       OdeTolerance{tol, tol}, OdeTolerance{tol, tol}};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    auto rhs = [&](double, const S4& y) {
      const Vec2 p = y.head<2>();
      S4 o;
      o << vf(p), vf.nu(p, n_T), -chi(y[2]) * g(p);
      return o;
    };
    S4 y;
    y << xs[i], 0.0, 0.0;
    for (double t = 0.0; y[2] < 1.0; t += 1.0) y = integrate_dopri5<4>(rhs, y, t, t + 1.0, tl).back();
    out[i] = y[3];
  }
  return out;
}

Vec2 renormalized_average_gradient(const VectorField& vf, const Observable& g, int n_T,
                                   const Mollifier& chi, const Vec2& x, double tol) {
  if (g.empty()) return Vec2::Zero();
  if (vf.is_constant()) {
    // Each mode differentiates to 2 pi i k times itself; split by coordinate.
    Observable d1, d2;
    for (const auto& [k, c] : g.coeffs()) {
      if (k.second < 0 || (k.second == 0 && k.first <= 0)) continue;  // add() fills -k
      const std::complex<double> ic = std::complex<double>(0.0, kTwoPi) * c;
      if (k.first != 0) d1.add(k, ic * double(k.first));
      if (k.second != 0) d2.add(k, ic * double(k.second));
    }
    return {renormalized_average(vf, d1, n_T, chi, x, tol),
            renormalized_average(vf, d2, n_T, chi, x, tol)};
  }
  // State: pos(2), xi(4), tau(1), grad tau(2), gradient accumulator(2).
  using S11 = Eigen::Matrix<double, 11, 1>;
  auto rhs = [&](double, const S11& y) {
    const Vec2 p = y.head<2>();
    Mat2 xi;
    xi << y[2], y[4], y[3], y[5];
    const Mat2 d = vf.derivative(p) * xi;
    const auto [nv, gn] = vf.nu_jet(p, n_T);
    const Vec2 gt = xi.transpose() * gn;
    const Vec2 gtau(y[7], y[8]);
    const Vec2 acc =
        -(chi.derivative(y[6]) * g(p) * gtau + chi(y[6]) * xi.transpose() * g.gradient(p));
    S11 o;
    o << vf(p), d(0, 0), d(1, 0), d(0, 1), d(1, 1), nv, gt, acc;
    return o;
  };
  S11 y;
  y << x, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0;
  std::array<OdeTolerance, 11> tl;
  tl.fill(OdeTolerance{tol, tol});
  tl[0] = tl[1] = OdeTolerance{tol, 0.0};
  for (double t = 0.0; y[6] < 1.0; t += 1.0) y = integrate_dopri5<11>(rhs, y, t, t + 1.0, tl).back();
  return {y[9], y[10]};
}

// ---------------------------------------------------------------------------

namespace {

// s -> tau_m^{-1}(F^{-m} z, s) on [0, S]: the integral of w_m along the flow from z.
class PreimageClock {
 public:
  PreimageClock(const VectorField& vf, const Vec2& z, int m, double S) {
    if (vf.is_constant() || m == 0) {
      rate_ = m == 0 ? 1.0 : 1.0 / vf.nu(z, m);
      return;
    }
    using S3 = Eigen::Matrix<double, 3, 1>;
    auto rhs = [&](double, const S3& y) {
      const Vec2 p = y.head<2>();
      S3 o;
      o << vf(p), vf.inverse_weight(p, m);
      return o;
    };
    S3 y0;
    y0 << z, 0.0;
    const std::array<OdeTolerance, 3> tl{OdeTolerance{1e-11, 0.0}, OdeTolerance{1e-11, 0.0},
                                         OdeTolerance{1e-11, 1e-11}};
    traj_ = integrate_dopri5<3>(rhs, y0, 0.0, S, tl);
    dense_ = true;
  }
  double operator()(double s) const { return dense_ ? traj_(s)[2] : rate_ * s; }

 private:
  bool dense_ = false;
  double rate_ = 1.0;
  DenseTrajectory<3> traj_;
};

// s -> tau_m(z, s) on [0, S].
class ForwardClock {
 public:
  ForwardClock(const VectorField& vf, const Vec2& z, int m, double S) {
    if (vf.is_constant()) {
      rate_ = vf.nu(z, m);
      return;
    }
    using S3 = Eigen::Matrix<double, 3, 1>;
    auto rhs = [&](double, const S3& y) {
      const Vec2 p = y.head<2>();
      S3 o;
      o << vf(p), vf.nu(p, m);
      return o;
    };
    S3 y0;
    y0 << z, 0.0;
    const std::array<OdeTolerance, 3> tl{OdeTolerance{1e-11, 0.0}, OdeTolerance{1e-11, 0.0},
                                         OdeTolerance{1e-12, 1e-12}};
    traj_ = integrate_dopri5<3>(rhs, y0, 0.0, S, tl);
    dense_ = true;
  }
  double operator()(double s) const { return dense_ ? traj_(s)[2] : rate_ * s; }

 private:
  bool dense_ = false;
  double rate_ = 1.0;
  DenseTrajectory<3> traj_;
};

Vec2 forward_lift(const MapSpec& m, Vec2 x, int n) {
  for (int i = 0; i < n; ++i) x = m.apply_lift(x);
  return x;
}

double edge_left(double s, double delta) { return 1.0 - smooth_step((s - delta) / delta); }
double edge_right(double s, double b, double delta) {
  return smooth_step((s - (b - 2.0 * delta)) / delta);
}

}  // namespace

Decomposition decompose(const VectorField& vf, const Vec2& x, double t, double delta) {
  if (t <= 0.0) throw InvalidSpec("decomposition needs t > 0");
  if (!(delta > 0.0 && delta < 0.25)) throw InvalidSpec("delta must lie in (0, 1/4)");
  Decomposition D;
  D.n_t = n_t_pointwise(vf, x, t);
  const MapSpec& map = vf.map();
  if (D.n_t == 0) {
    D.tau = t;
    const double h = 0.5 * t;
    D.boundary.push_back({-1, 0, x, {0.0, h, [](double) { return 1.0; }, false}});
    D.boundary.push_back({+1, 0, x, {h, t, [](double) { return 1.0; }, false}});
    return D;
  }
  const int n1 = D.n_t;
  const Vec2 z1 = forward_lift(map, x, n1);
  D.tau = Cocycle(vf, x, n1, t).tau(t);
  const double tau = D.tau;
  if (tau < 4.0 * delta) throw RecursionStall("renormalized length below 4 delta");

  auto plateau = [tau, delta](double s) {
    return 1.0 - edge_left(s, delta) - edge_right(s, tau, delta);
  };
  D.pieces.push_back({-1, n1, z1, {0.0, tau, [plateau](double s) { return 0.5 * plateau(s); }}});
  D.pieces.push_back({+1, n1, z1, {0.0, tau, [plateau](double s) { return 0.5 * plateau(s); }}});

  for (int side : {-1, +1}) {
    int n = n1;
    std::function<double(double)> psi;
    double lo, hi;
    if (side < 0) {
      psi = [delta](double s) { return edge_left(s, delta); };
      lo = 0.0;
      hi = std::min(2.0 * delta, tau);
    } else {
      psi = [tau, delta](double s) { return edge_right(s, tau, delta); };
      lo = std::max(0.0, tau - 2.0 * delta);
      hi = tau;
    }
    while (true) {
      const Vec2 zn = forward_lift(map, x, n);
      // Largest m <= n whose pulled-back support stays shorter than 1.
      int m = 0;
      double new_lo = lo, new_hi = hi;
      for (int c = 1; c <= n; ++c) {
        const PreimageClock clock(vf, zn, c, hi);
        const double a = clock(lo), b = clock(hi);
        if (b - a >= 1.0) break;
        m = c;
        new_lo = a;
        new_hi = b;
      }
      if (m == 0) throw RecursionStall("window support cannot be pulled back");
      const int n_new = n - m;
      const Vec2 z_new = forward_lift(map, x, n_new);
      auto coc = std::make_shared<ForwardClock>(vf, z_new, m, new_hi);
      const double clo = new_lo, shi = new_hi;
      auto hat = [psi, coc, clo, shi](double s) {
        if (s < clo || s > shi) return 0.0;
        return psi((*coc)(s));
      };
      if (n_new == 0) {
        D.boundary.push_back({side, 0, x, {new_lo, new_hi, hat, false}});
        break;
      }
      if (side < 0) {
        D.pieces.push_back({side, n_new, z_new,
                            {new_lo, new_hi,
                             [hat, delta](double s) { return (1.0 - edge_left(s, delta)) * hat(s); }}});
        psi = [hat, delta](double s) { return edge_left(s, delta) * hat(s); };
        lo = new_lo;
        hi = std::min(new_hi, 2.0 * delta);
      } else {
        const double b = new_hi;
        D.pieces.push_back(
            {side, n_new, z_new,
             {new_lo, new_hi,
              [hat, b, delta](double s) { return (1.0 - edge_right(s, b, delta)) * hat(s); }}});
        psi = [hat, b, delta](double s) { return edge_right(s, b, delta) * hat(s); };
        lo = std::max(new_lo, b - 2.0 * delta);
        hi = b;
      }
      n = n_new;
    }
  }

  int km = 0, kp = 0;
  double cmax = 0.0;
  for (const auto& p : D.pieces) {
    (p.side < 0 ? km : kp)++;
    cmax = std::max(cmax, p.window.sampled_c1_norm());
  }
  D.K = std::max(km, kp);
  D.c_star = 2.0 * cmax;
  return D;
}

double reconstruct(const VectorField& vf, const Decomposition& d, const ScalarField& g,
                   double tol) {
  double acc = 0.0;
  for (const auto& p : d.pieces)
    acc += mollified_functional(vf, p.base, p.window, transfer_pointwise(vf, g, p.n), tol);
  for (const auto& p : d.boundary) acc += mollified_functional(vf, p.base, p.window, g, tol);
  return acc;
}

// ---------------------------------------------------------------------------

double loglog_slope(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 2) throw InvalidSpec("loglog fit needs >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double lx = std::log(t[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

GrowthFit growth_exponent(const VectorField& vf, const Observable& g, const std::vector<Vec2>& xs,
                          double t0, double t1, int samples) {
  if (xs.empty() || !(t0 > 0.0 && t1 > t0) || samples < 2)
    throw InvalidSpec("growth fit needs base points and 0 < t0 < t1");
  GrowthFit fit;
  for (int i = 0; i < samples; ++i)
    fit.t.push_back(t0 * std::pow(t1 / t0, double(i) / (samples - 1)));
  fit.value.assign(fit.t.size(), 0.0);
  const double dt = 0.05;
  for (const Vec2& x : xs) {
    std::function<double(double)> H;
    DenseTrajectory<3> dense;
    if (vf.is_constant()) {
      H = [&](double t) { return ergodic_integral(vf, x, t, g); };
    } else {
      using S3 = Eigen::Matrix<double, 3, 1>;
      auto rhs = [&](double, const S3& y) {
        const Vec2 p = y.head<2>();
        S3 o;
        o << vf(p), g(p);
        return o;
      };
      S3 y0;
      y0 << x, 0.0;
      dense = integrate_dopri5<3>(
          rhs, y0, 0.0, t1,
          {OdeTolerance{1e-10, 0.0}, OdeTolerance{1e-10, 0.0}, OdeTolerance{1e-10, 1e-10}});
      H = [&](double t) { return dense(t)[2]; };
    }
    double run = 0.0, t = 0.0;
    std::size_t idx = 0;
    while (idx < fit.t.size()) {
      const double tn = std::min(t + dt, fit.t[idx]);
      run = std::max(run, std::abs(H(tn)));
      t = tn;
      if (t >= fit.t[idx]) fit.value[idx++] += run / double(xs.size());
    }
  }
  fit.slope = loglog_slope(fit.t, fit.value);
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < fit.t.size(); ++i) {
    sx += std::log(fit.t[i]);
    sy += std::log(fit.value[i]);
  }
  fit.intercept = (sy - fit.slope * sx) / double(fit.t.size());
  return fit;
}

}  // namespace renorm
