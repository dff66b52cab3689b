#pragma once

#include "renorm/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace renorm {

/**
 * @brief Dormand-Prince 5(4) solution with continuous extension.
 *
 * Segments are stored in integration order; t may run backwards (h < 0).
 */
template <int N>
class DenseTrajectory {
 public:
  using State = Eigen::Matrix<double, N, 1>;

  struct Segment {
    double t0 = 0.0;
    double h = 0.0;
    State r1, r2, r3, r4, r5;
  };

  DenseTrajectory() = default;
  DenseTrajectory(double t0, const State& y0) : t0_(t0), t1_(t0), y0_(y0), y1_(y0) {}

  double t_begin() const { return t0_; }
  double t_end() const { return t1_; }
  const State& front() const { return y0_; }
  const State& back() const { return y1_; }
  const std::vector<Segment>& segments() const { return seg_; }
  std::size_t steps() const { return seg_.size(); }

  /// Step nodes t0 < t_1 < ... (or decreasing), including both ends.
  std::vector<double> nodes() const {
    std::vector<double> t{t0_};
    for (const auto& s : seg_) t.push_back(s.t0 + s.h);
    if (!seg_.empty()) t.back() = t1_;
    return t;
  }

  State operator()(double t) const {
    if (seg_.empty()) return y0_;
    const std::size_t i = locate(t);
    const Segment& s = seg_[i];
    const double th = (t - s.t0) / s.h;
    const double th1 = 1.0 - th;
    return s.r1 + th * (s.r2 + th1 * (s.r3 + th * (s.r4 + th1 * s.r5)));
  }

  void push(const Segment& s, double t_new, const State& y_new) {
    seg_.push_back(s);
    t1_ = t_new;
    y1_ = y_new;
  }

 private:
  std::size_t locate(double t) const {
    const bool fwd = seg_.front().h > 0;
    // First segment whose end passes t.
    auto it = std::lower_bound(seg_.begin(), seg_.end(), t, [fwd](const Segment& s, double v) {
      const double e = s.t0 + s.h;
      return fwd ? e < v : e > v;
    });
    if (it == seg_.end()) --it;
    return std::size_t(it - seg_.begin());
  }

  double t0_ = 0.0, t1_ = 0.0;
  State y0_, y1_;
  std::vector<Segment> seg_;
};

struct OdeTolerance {
  double atol = 1e-10;
  double rtol = 0.0;
};

namespace dopri {

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

// One step from (t, y) with first stage k1; fills y1, k7 (FSAL), error vector and segment.
template <int N, class F>
void step(F& f, double t, const Eigen::Matrix<double, N, 1>& y, const Eigen::Matrix<double, N, 1>& k1,
          double h, Eigen::Matrix<double, N, 1>& y1, Eigen::Matrix<double, N, 1>& k7,
          Eigen::Matrix<double, N, 1>& err, typename DenseTrajectory<N>::Segment* seg) {
  using S = Eigen::Matrix<double, N, 1>;
  const S k2 = f(t + c2 * h, S(y + h * a21 * k1));
  const S k3 = f(t + c3 * h, S(y + h * (a31 * k1 + a32 * k2)));
  const S k4 = f(t + c4 * h, S(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
  const S k5 = f(t + c5 * h, S(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
  const S k6 = f(t + h, S(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
  y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
  k7 = f(t + h, y1);
  err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  if (seg) {
    const S ydiff = y1 - y;
    const S bspl = h * k1 - ydiff;
    seg->t0 = t;
    seg->h = h;
    seg->r1 = y;
    seg->r2 = ydiff;
    seg->r3 = bspl;
    seg->r4 = ydiff - h * k7 - bspl;
    seg->r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
  }
}

}  // namespace dopri

/**
 * @brief Adaptive DOPRI5 from t0 to t1 with per-component tolerances.
 *
 * Throws StepUnderflow when the step falls below 1e-12 of the span or the
 * step budget runs out.
 */
template <int N, class F>
DenseTrajectory<N> integrate_dopri5(F&& f, const Eigen::Matrix<double, N, 1>& y0, double t0,
                                    double t1, const std::array<OdeTolerance, N>& tol,
                                    double h0 = 0.0, long max_steps = 5'000'000) {
  using S = Eigen::Matrix<double, N, 1>;
  DenseTrajectory<N> traj(t0, y0);
  if (t1 == t0) return traj;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  double t = t0;
  S y = y0;
  S k1 = f(t, y);

  auto err_norm = [&](const S& e, const S& ya, const S& yb) {
    double acc = 0.0;
    for (int i = 0; i < N; ++i) {
      const double sc =
          tol[i].atol + tol[i].rtol * std::max(std::abs(ya[i]), std::abs(yb[i]));
      const double r = e[i] / sc;
      acc += r * r;
    }
    return std::sqrt(acc / N);
  };

  double h = h0 > 0 ? h0 : std::min(span, 0.01 * std::max(1.0, span) /
                                              std::max(1.0, k1.template lpNorm<Eigen::Infinity>()));
  h = std::min(h, span);
  double err_old = 1e-4;
  S y1, k7, err;
  typename DenseTrajectory<N>::Segment seg;
  long nsteps = 0;
  while (dir * (t1 - t) > 0.0) {
    if (++nsteps > max_steps) throw StepUnderflow("step budget exhausted");
    const double rest = std::abs(t1 - t);
    bool last = false;
    if (h >= rest * (1.0 - 1e-12)) {
      h = rest;
      last = true;
    }
    dopri::step<N>(f, t, y, k1, dir * h, y1, k7, err, &seg);
    const double en = err_norm(err, y, y1);
    if (!std::isfinite(en)) {
      h *= 0.1;
      if (h < 1e-12 * span) throw StepUnderflow("non-finite state");
      continue;
    }
    if (en <= 1.0) {
      const double tn = last ? t1 : t + dir * h;
      traj.push(seg, tn, y1);
      t = tn;
      y = y1;
      k1 = k7;
      // PI controller (Hairer's beta = 0.04).
      const double fac = std::clamp(0.9 * std::pow(en, -0.2) * std::pow(err_old, 0.04), 0.2, 10.0);
      err_old = std::max(en, 1e-4);
      h *= fac;
    } else {
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      if (h < 1e-12 * span) throw StepUnderflow("step size underflow at t=" + std::to_string(t));
    }
  }
  return traj;
}

/// Same scheme without error control on a prescribed node sequence.
template <int N, class F>
DenseTrajectory<N> integrate_dopri5_nodes(F&& f, const Eigen::Matrix<double, N, 1>& y0,
                                          const std::vector<double>& nodes) {
  using S = Eigen::Matrix<double, N, 1>;
  DenseTrajectory<N> traj(nodes.front(), y0);
  S y = y0, y1, k7, err;
  S k1 = f(nodes.front(), y);
  typename DenseTrajectory<N>::Segment seg;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double h = nodes[i + 1] - nodes[i];
    dopri::step<N>(f, nodes[i], y, k1, h, y1, k7, err, &seg);
    traj.push(seg, nodes[i + 1], y1);
    y = y1;
    k1 = k7;
  }
  return traj;
}

}  // namespace renorm
