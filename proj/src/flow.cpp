#include "renorm/flow.hpp"

#include "renorm/errors.hpp"
#include "stable_chain.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <limits>

namespace renorm {

namespace {

using detail::Dual;

struct Jet {
  Vec2 V;
  Mat2 DV;
};

// N and its gradient evaluated at a dual point: value and d/dx of N(y(x)).
Dual norm_at(const Observable& N, const Dual& y1, const Dual& y2) {
  const Vec2 y(y1.v, y2.v);
  const Vec2 g = N.gradient(y);
  return {N(y), g[0] * y1.d + g[1] * y2.d};
}

double ipow(double b, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= b;
  return r;
}

}  // namespace

VectorField::VectorField(VectorFieldSpec spec, int depth) : spec_(std::move(spec)) {
  if (spec_.orientation != 1 && spec_.orientation != -1)
    throw InvalidSpec("orientation must be +1 or -1");
  if (spec_.norm.empty()) throw InvalidSpec("norm function is empty");
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j)
      if (!(spec_.norm(Vec2(i / 64.0, j / 64.0)) > 0.0))
        throw InvalidSpec("norm function must be positive");
  e0_ = linear_stable_direction(spec_.map.A());
  if (spec_.map.is_linear()) {
    depth_ = 1;
  } else {
    depth_ = depth > 0 ? depth : calibrate_stable_depth(spec_.map);
  }
  constant_ = spec_.map.is_linear() && spec_.norm.degree() == 0;
}

Vec2 VectorField::direction(const Vec2& x) const {
  if (spec_.map.is_linear()) return e0_;
  const auto c = detail::stable_chain<double>(spec_.map, x[0], x[1], 0, depth_, e0_);
  return {c.e1, c.e2};
}

Vec2 VectorField::operator()(const Vec2& x) const {
  return double(spec_.orientation) * spec_.norm(x) * direction(x);
}

Mat2 VectorField::derivative(const Vec2& x) const {
  const double o = spec_.orientation;
  const Vec2 gN = spec_.norm.gradient(x);
  if (spec_.map.is_linear()) return o * e0_ * gN.transpose();
  const auto c = detail::stable_chain<Dual>(spec_.map, Dual(x[0], Vec2(1, 0)),
                                            Dual(x[1], Vec2(0, 1)), 0, depth_, e0_);
  Mat2 De;
  De.row(0) = c.e1.d.transpose();
  De.row(1) = c.e2.d.transpose();
  const Vec2 e(c.e1.v, c.e2.v);
  return o * (e * gN.transpose() + spec_.norm(x) * De);
}

Mat2 VectorField::derivative_fd(const Vec2& x, double h) const {
  const Vec2 u = direction(x);
  const Vec2 w(-u[1], u[0]);
  const Vec2 du = ((*this)(x + h * u) - (*this)(x - h * u)) / (2 * h);
  const Vec2 dw = ((*this)(x + h * w) - (*this)(x - h * w)) / (2 * h);
  Mat2 cols, frame;
  cols << du, dw;
  frame << u, w;
  return cols * frame.transpose();
}

double VectorField::nu(const Vec2& x, int n) const {
  if (n == 0) return 1.0;
  const MapSpec& m = spec_.map;
  if (m.is_linear()) {
    const double nub = 1.0 / std::exp(topological_entropy(m));
    if (constant_) return ipow(nub, n);
    Vec2 y = x;
    for (int i = 0; i < n; ++i) y = m.apply_lift(y);
    return ipow(nub, n) * spec_.norm(x) / spec_.norm(y);
  }
  const auto c = detail::stable_chain<double>(m, x[0], x[1], n, depth_ + n, e0_);
  if (c.flipped) throw SignError("D F^n reverses the stable orientation");
  return std::exp(c.log_growth) * spec_.norm(x) / spec_.norm(Vec2(c.y1, c.y2));
}

std::vector<double> VectorField::nu_levels(const Vec2& x, int n_max, Vec2* field) const {
  if (n_max < 0) throw InvalidSpec("nu_levels needs n_max >= 0");
  std::vector<double> out(std::size_t(n_max) + 1, 1.0);
  const MapSpec& m = spec_.map;
  if (m.is_linear()) {
    const double nub = 1.0 / std::exp(topological_entropy(m));
    const double Nx = spec_.norm(x);
    Vec2 y = x;
    double p = 1.0;
    for (int n = 1; n <= n_max; ++n) {
      y = m.apply_lift(y);
      y -= y.array().floor().matrix();  // the norm is periodic; wrapping keeps digits
      p *= nub;
      out[n] = constant_ ? p : p * Nx / spec_.norm(y);
    }
    if (field) *field = (*this)(x);
    return out;
  }
  thread_local detail::ChainSteps st;
  st.orbit.clear();
  const auto c = detail::stable_chain<double>(m, x[0], x[1], n_max, depth_ + n_max, e0_, &st);
  if (c.flipped) throw SignError("D F^n reverses the stable orientation");
  const double Nx = spec_.norm(x);
  if (field) *field = double(spec_.orientation) * Nx * Vec2(c.e1, c.e2);
  double growth = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    growth /= st.r[std::size_t(n - 1)];
    out[n] = growth * Nx / spec_.norm(st.orbit[std::size_t(n)]);
  }
  return out;
}

std::pair<double, Vec2> VectorField::nu_jet(const Vec2& x, int n) const {
  if (n == 0) return {1.0, Vec2::Zero()};
  const MapSpec& m = spec_.map;
  if (m.is_linear()) {
    if (constant_) return {nu(x, n), Vec2::Zero()};
    Mat2 An = Mat2::Identity();
    Vec2 y = x;
    for (int i = 0; i < n; ++i) {
      y = m.apply_lift(y);
      An = m.A_real() * An;
    }
    const double v = nu(x, n);
    const Vec2 g = v * (spec_.norm.gradient(x) / spec_.norm(x) -
                        An.transpose() * spec_.norm.gradient(y) / spec_.norm(y));
    return {v, g};
  }
  const auto c = detail::stable_chain<Dual>(m, Dual(x[0], Vec2(1, 0)), Dual(x[1], Vec2(0, 1)), n,
                                            depth_ + n, e0_);
  if (c.flipped) throw SignError("D F^n reverses the stable orientation");
  const Dual Nx = norm_at(spec_.norm, Dual(x[0], Vec2(1, 0)), Dual(x[1], Vec2(0, 1)));
  const Dual Ny = norm_at(spec_.norm, c.y1, c.y2);
  const double v = std::exp(c.log_growth.v) * Nx.v / Ny.v;
  return {v, v * (c.log_growth.d + Nx.d / Nx.v - Ny.d / Ny.v)};
}

double VectorField::inverse_weight(const Vec2& y, int n) const {
  if (n == 0) return 1.0;
  if (constant_) return 1.0 / nu(y, n);
  Vec2 z = TorusPoint(y[0], y[1]).vec();
  for (int i = 0; i < n; ++i) {
    z = spec_.map.invert_lift(z);
    z = TorusPoint(z[0], z[1]).vec();
  }
  return 1.0 / nu(z, n);
}

Vec2 eval_V(const VectorFieldSpec& vf, const TorusPoint& p) {
  return double(vf.orientation) * vf.norm(p) * stable_direction(vf.map, p);
}

namespace {

Jet field_jet(const VectorField& vf, const Vec2& x) {
  return {vf(x), vf.derivative(x)};
}

using S2 = Eigen::Matrix<double, 2, 1>;
using S6 = Eigen::Matrix<double, 6, 1>;
using S9 = Eigen::Matrix<double, 9, 1>;

S6 jac_rhs(const VectorField& vf, const S6& y) {
  const Jet j = field_jet(vf, y.head<2>());
  Mat2 xi;
  xi << y[2], y[4], y[3], y[5];
  const Mat2 d = j.DV * xi;
  S6 out;
  out << j.V, d(0, 0), d(1, 0), d(0, 1), d(1, 1);
  return out;
}

std::array<OdeTolerance, 6> jac_tol(double tol) {
  return {OdeTolerance{tol, 0.0}, OdeTolerance{tol, 0.0}, OdeTolerance{tol, tol},
          OdeTolerance{tol, tol}, OdeTolerance{tol, tol}, OdeTolerance{tol, tol}};
}

S6 jac_start(const Vec2& x) {
  S6 y0;
  y0 << x, 1.0, 0.0, 0.0, 1.0;
  return y0;
}

}  // namespace

Vec2 Trajectory::position(double t) const {
  if (exact_) return x0_ + t * vel_;
  if (jac_) return pj_(t).head<2>();
  return p_(t);
}

Mat2 Trajectory::jacobian(double t) const {
  if (!jac_) throw InvalidSpec("trajectory has no Jacobian track");
  if (exact_) return Mat2::Identity();
  const S6 y = pj_(t);
  Mat2 m;
  m << y[2], y[4], y[3], y[5];
  return m;
}

std::vector<double> Trajectory::nodes() const {
  if (exact_) return {0.0, t1_};
  return jac_ ? pj_.nodes() : p_.nodes();
}

Trajectory trace(const VectorField& vf, const Vec2& x, double t, bool with_jacobian, double tol) {
  Trajectory tr;
  tr.x0_ = x;
  tr.t1_ = t;
  tr.jac_ = with_jacobian;
  if (vf.is_constant()) {
    tr.exact_ = true;
    tr.vel_ = vf(x);
    return tr;
  }
  if (with_jacobian) {
    tr.pj_ = integrate_dopri5<6>([&](double, const S6& y) { return jac_rhs(vf, y); }, jac_start(x),
                                 0.0, t, jac_tol(tol));
  } else {
    tr.p_ = integrate_dopri5<2>([&](double, const S2& y) -> S2 { return vf(y); }, S2(x), 0.0, t,
                                {OdeTolerance{tol, 0.0}, OdeTolerance{tol, 0.0}});
  }
  return tr;
}

Trajectory trace_on_nodes(const VectorField& vf, const Vec2& x, const std::vector<double>& nodes,
                          bool with_jacobian) {
  Trajectory tr;
  tr.x0_ = x;
  tr.t1_ = nodes.back();
  tr.jac_ = with_jacobian;
  if (vf.is_constant()) {
    tr.exact_ = true;
    tr.vel_ = vf(x);
    return tr;
  }
  if (with_jacobian) {
    tr.pj_ = integrate_dopri5_nodes<6>([&](double, const S6& y) { return jac_rhs(vf, y); },
                                       jac_start(x), nodes);
  } else {
    tr.p_ = integrate_dopri5_nodes<2>([&](double, const S2& y) -> S2 { return vf(y); }, S2(x),
                                      nodes);
  }
  return tr;
}

TorusPoint flow(const VectorField& vf, const TorusPoint& p, double t, double tol) {
  if (tol <= 0.0) throw InvalidSpec("tolerance must be positive");
  return trace(vf, p.vec(), t, false, tol).point(t);
}

std::pair<TorusPoint, Mat2> flow_with_jacobian(const VectorField& vf, const TorusPoint& p, double t,
                                               double tol) {
  if (tol <= 0.0) throw InvalidSpec("tolerance must be positive");
  const Trajectory tr = trace(vf, p.vec(), t, true, tol);
  return {tr.point(t), tr.jacobian(t)};
}

// ---------------------------------------------------------------------------

Cocycle::Cocycle(const VectorField& vf, const Vec2& x, int n, double t_max, double tol)
    : vf_(&vf), x_(x), n_(n), t_max_(t_max) {
  if (n < 0) throw InvalidSpec("cocycle order must be >= 0");
  if (t_max < 0.0) throw InvalidSpec("cocycle horizon must be >= 0");
  const MapSpec& m = vf.map();
  fx_ = x;
  for (int i = 0; i < n; ++i) fx_ = m.apply_lift(fx_);
  dfn_ = jacobian_power(m, TorusPoint::from_lift(x), n);
  nu_ = vf.nu(x, n);
  if (!(nu_ > 0.0)) throw SignError("nu_n must be positive");
  exact_ = vf.is_constant();
  if (exact_) return;

  auto rhs = [&](double, const S9& y) {
    const Vec2 p = y.head<2>();
    const Jet j = field_jet(vf, p);
    const auto [nv, gn] = vf.nu_jet(p, n);
    Mat2 xi;
    xi << y[2], y[4], y[3], y[5];
    const Mat2 d = j.DV * xi;
    const Vec2 gt = xi.transpose() * gn;
    S9 out;
    out << j.V, d(0, 0), d(1, 0), d(0, 1), d(1, 1), nv, gt;
    return out;
  };
  S9 y0;
  y0 << x, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0;
  std::array<OdeTolerance, 9> tl;
  tl.fill(OdeTolerance{tol, tol});
  tl[0] = tl[1] = OdeTolerance{tol, 0.0};
  traj_ = integrate_dopri5<9>(rhs, y0, 0.0, t_max, tl);
}

double Cocycle::tau(double t) const {
  if (exact_) return nu_ * t;
  return traj_(t)[6];
}

Vec2 Cocycle::grad_tau(double t) const {
  if (exact_) return Vec2::Zero();
  const S9 y = traj_(t);
  return {y[7], y[8]};
}

Vec2 Cocycle::position(double t) const {
  if (exact_) return x_ + t * (*vf_)(x_);
  return traj_(t).head<2>();
}

Mat2 Cocycle::flow_jacobian(double t) const {
  if (exact_) return Mat2::Identity();
  const S9 y = traj_(t);
  Mat2 m;
  m << y[2], y[4], y[3], y[5];
  return m;
}

double Cocycle::tau_inverse(double s) const {
  if (s < 0.0) throw InvalidSpec("tau_inverse needs s >= 0");
  if (s == 0.0) return 0.0;
  if (exact_) return s / nu_;
  const double top = tau(t_max_);
  if (s > top * (1.0 + 1e-12)) throw InvalidSpec("tau_inverse argument beyond the cocycle horizon");
  if (s >= top) return t_max_;
  boost::uintmax_t iters = 200;
  auto f = [&](double t) { return tau(t) - s; };
  const auto br = boost::math::tools::toms748_solve(
      f, 0.0, t_max_, -s, top - s, boost::math::tools::eps_tolerance<double>(52), iters);
  double t = 0.5 * (br.first + br.second);
  // Newton polish with the exact derivative tau' = nu_n(phi_t x).
  for (int k = 0; k < 2; ++k) {
    const double r = tau(t) - s;
    if (r == 0.0) break;
    t -= r / vf_->nu(position(t), n_);
  }
  return std::clamp(t, 0.0, t_max_);
}

Mat2 Cocycle::A_matrix(double s) const {
  const double t = tau_inverse(s);
  return Mat2::Identity() + ((*vf_)(x_) / nu_) * grad_tau(t).transpose();
}

Mat2 Cocycle::theta(double s) const { return dfn_ * A_matrix(s); }

Vec2 grad_tau_fd(const VectorField& vf, const Vec2& x, int n, double t, double h) {
  if (vf.is_constant()) return Vec2::Zero();
  using S3 = Eigen::Matrix<double, 3, 1>;
  auto rhs = [&](double, const S3& y) {
    const Vec2 p = y.head<2>();
    S3 out;
    out << vf(p), vf.nu(p, n);
    return out;
  };
  const std::array<OdeTolerance, 3> tl{OdeTolerance{1e-11, 0.0}, OdeTolerance{1e-11, 0.0},
                                       OdeTolerance{1e-11, 1e-11}};
  S3 y0;
  y0 << x, 0.0;
  const auto nodes = integrate_dopri5<3>(rhs, y0, 0.0, t, tl).nodes();
  Vec2 g;
  for (int i = 0; i < 2; ++i) {
    S3 yp = y0, ym = y0;
    yp[i] += h;
    ym[i] -= h;
    const double tp = integrate_dopri5_nodes<3>(rhs, yp, nodes).back()[2];
    const double tm = integrate_dopri5_nodes<3>(rhs, ym, nodes).back()[2];
    g[i] = (tp - tm) / (2 * h);
  }
  return g;
}

double unit_preimage_time(const VectorField& vf, const Vec2& x, int n, double tol) {
  if (vf.is_constant()) return 1.0 / vf.nu(x, n);
  Vec2 y = x;
  for (int i = 0; i < n; ++i) y = vf.map().apply_lift(y);
  y = TorusPoint(y[0], y[1]).vec();  // the integrand is periodic
  using S3 = Eigen::Matrix<double, 3, 1>;
  auto rhs = [&](double, const S3& z) {
    const Vec2 p = z.head<2>();
    S3 out;
    out << vf(p), vf.inverse_weight(p, n);
    return out;
  };
  S3 y0;
  y0 << y, 0.0;
  const std::array<OdeTolerance, 3> tl{OdeTolerance{tol, 0.0}, OdeTolerance{tol, 0.0},
                                       OdeTolerance{tol, tol}};
  return integrate_dopri5<3>(rhs, y0, 0.0, 1.0, tl).back()[2];
}

RotationResult diophantine_residual(const IMat2& A, double rho) {
  const double a = double(A(0, 0)), b = double(A(0, 1)), c = double(A(1, 0)), d = double(A(1, 1));
  RotationResult r;
  r.rho = rho;
  r.residual = std::numeric_limits<double>::infinity();
  for (int k = -5; k <= 5; ++k) {
    const double w = rho + k;
    const double v = std::abs(b * w * w + (a - d) * w - c);
    if (v < r.residual) {
      r.residual = v;
      r.best_shift = k;
    }
  }
  return r;
}

RotationResult rotation_number(const VectorField& vf, int section_axis, int n_returns, double tol) {
  if (section_axis != 0 && section_axis != 1) throw InvalidSpec("section axis must be 0 or 1");
  if (n_returns < 1) throw InvalidSpec("need at least one return");
  const int a = section_axis, b = 1 - section_axis;
  double sign = 0.0;
  for (int i = 0; i < 256; ++i) {
    Vec2 p = Vec2::Zero();
    p[b] = i / 256.0;
    const double va = vf(p)[a];
    if (std::abs(va) <= 0.1) throw TransversalityFailure("field nearly tangent to the section");
    const double sg = va > 0 ? 1.0 : -1.0;
    if (sign != 0.0 && sg != sign) throw TransversalityFailure("field crosses the section both ways");
    sign = sg;
  }
  // The section coordinate is monotone along orbits; use it as the independent variable.
  using S1 = Eigen::Matrix<double, 1, 1>;
  const double y0 = 0.0;
  auto rhs = [&](double u, const S1& y) {
    Vec2 p;
    p[a] = u;
    p[b] = y[0];
    const Vec2 v = vf(p);
    return S1(v[b] / v[a]);
  };
  const double u1 = sign * n_returns;
  const auto tr = integrate_dopri5<1>(rhs, S1(y0), 0.0, u1, {OdeTolerance{tol, 0.0}});
  const double shift = (tr.back()[0] - y0) / n_returns;
  return diophantine_residual(vf.map().A(), wrap01(shift));
}

}  // namespace renorm
