#include "renorm/torus.hpp"

#include "renorm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

namespace renorm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec2 canonical_orientation(Vec2 v) {
  v.normalize();
  if (v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0)) v = -v;
  return v;
}

// Eigenvector of A for eigenvalue mu, normalized.
Vec2 eigvec(const IMat2& A, double mu) {
  const double a = double(A(0, 0)), b = double(A(0, 1)), c = double(A(1, 0)), d = double(A(1, 1));
  Vec2 v = std::abs(b) >= std::abs(c) ? Vec2(b, mu - a) : Vec2(mu - d, c);
  return canonical_orientation(v);
}

std::pair<double, double> eigenvalues(const IMat2& A) {
  const double t = double(A(0, 0) + A(1, 1));
  const double root = std::sqrt(t * t - 4.0);
  const double big = 0.5 * (t + root);
  return {1.0 / big, big};
}

IMat2 ipow(const IMat2& A, int n) {
  IMat2 r = IMat2::Identity();
  for (int i = 0; i < n; ++i) r = r * A;
  return r;
}

std::int64_t pmod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

// a*u + b*v = g = gcd(a,b) >= 0.
std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& u, std::int64_t& v) {
  std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
    std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
    std::tie(old_t, t) = std::make_pair(t, old_t - q * t);
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  u = old_s;
  v = old_t;
  return old_r;
}

}  // namespace

double wrap01(double v) {
  double r = v - std::floor(v);
  if (r >= 1.0) r = 0.0;
  return r;
}

double torus_distance(const Vec2& a, const Vec2& b) {
  Vec2 d = a - b;
  for (int i = 0; i < 2; ++i) d[i] -= std::round(d[i]);
  return d.norm();
}

double torus_distance(const TorusPoint& a, const TorusPoint& b) {
  return torus_distance(a.vec(), b.vec());
}

MapSpec::MapSpec(const IMat2& A, double alpha, Variant variant)
    : A_(A), alpha_(alpha), variant_(variant) {
  const std::int64_t det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  const std::int64_t tr = A(0, 0) + A(1, 1);
  if (det != 1) throw InvalidSpec("linear part must have determinant 1");
  if (tr <= 2) throw InvalidSpec("linear part must have trace > 2");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidSpec("alpha must lie in [0, 1)");
  if (variant == Variant::Linear && alpha != 0.0)
    throw InvalidSpec("linear variant requires alpha = 0");
  Ar_ = A.cast<double>();
  Ainv_ << Ar_(1, 1), -Ar_(0, 1), -Ar_(1, 0), Ar_(0, 0);
}

MapSpec MapSpec::cat(double alpha) {
  IMat2 A;
  A << 2, 1, 1, 1;
  return MapSpec(A, alpha, alpha == 0.0 ? Variant::Linear : Variant::StandardFamily);
}

MapSpec MapSpec::with_alpha(double alpha) const {
  return MapSpec(A_, alpha, alpha == 0.0 ? variant_ : Variant::StandardFamily);
}

Vec2 MapSpec::apply_lift(const Vec2& z) const {
  const Vec2 g(z[0], z[1] - alpha_ / kTwoPi * std::sin(kTwoPi * z[0]));
  return Ar_ * g;
}

Mat2 MapSpec::jacobian_lift(const Vec2& z) const {
  Mat2 dg;
  dg << 1.0, 0.0, -alpha_ * std::cos(kTwoPi * z[0]), 1.0;
  return Ar_ * dg;
}

Vec2 MapSpec::invert_lift(const Vec2& q) const {
  Vec2 z = Ainv_ * q;
  if (alpha_ == 0.0) return z;
  // Round-off in the residual scales with the size of the lift.
  const double scale = std::max(1.0, q.lpNorm<Eigen::Infinity>());
  for (int it = 0; it < 50; ++it) {
    const Vec2 r = apply_lift(z) - q;
    if (r.lpNorm<Eigen::Infinity>() < 1e-15 * scale) return z;
    const Mat2 J = jacobian_lift(z);
    const Vec2 step = J.inverse() * r;
    z -= step;
    if (step.lpNorm<Eigen::Infinity>() < 1e-16 * scale) return z;
  }
  if ((apply_lift(z) - q).lpNorm<Eigen::Infinity>() < 1e-12 * scale) return z;
  throw NonConvergence("map inversion did not converge in 50 Newton steps");
}

TorusPoint apply_map(const MapSpec& spec, const TorusPoint& p) {
  return TorusPoint::from_lift(spec.apply_lift(p.vec()));
}

Mat2 jacobian(const MapSpec& spec, const TorusPoint& p) { return spec.jacobian_lift(p.vec()); }

TorusPoint invert_map(const MapSpec& spec, const TorusPoint& q) {
  return TorusPoint::from_lift(spec.invert_lift(q.vec()));
}

TorusPoint iterate(const MapSpec& spec, const TorusPoint& p, int n) {
  TorusPoint q = p;
  if (n >= 0) {
    for (int i = 0; i < n; ++i) q = apply_map(spec, q);
  } else {
    for (int i = 0; i < -n; ++i) q = invert_map(spec, q);
  }
  return q;
}

Mat2 jacobian_power(const MapSpec& spec, const TorusPoint& p, int n) {
  Mat2 J = Mat2::Identity();
  TorusPoint q = p;
  if (n >= 0) {
    for (int i = 0; i < n; ++i) {
      J = jacobian(spec, q) * J;
      q = apply_map(spec, q);
    }
  } else {
    for (int i = 0; i < -n; ++i) {
      q = invert_map(spec, q);
      J = J * jacobian(spec, q);
    }
    J = J.inverse().eval();
  }
  return J;
}

Vec2 linear_stable_direction(const IMat2& A) { return eigvec(A, eigenvalues(A).first); }

Vec2 linear_unstable_direction(const IMat2& A) { return eigvec(A, eigenvalues(A).second); }

namespace {

// Forward orbit p, Fp, ..., F^depth p (lifts of canonical points).
std::vector<Vec2> forward_orbit(const MapSpec& spec, const TorusPoint& p, int depth) {
  std::vector<Vec2> orb(depth + 1);
  TorusPoint q = p;
  for (int i = 0; i <= depth; ++i) {
    orb[i] = q.vec();
    if (i < depth) q = apply_map(spec, q);
  }
  return orb;
}

Vec2 pull_back(const MapSpec& spec, const std::vector<Vec2>& orb, int depth) {
  Vec2 v = linear_stable_direction(spec.A());
  for (int i = depth - 1; i >= 0; --i) {
    const Mat2 J = spec.jacobian_lift(orb[i]);
    Mat2 Jinv;
    Jinv << J(1, 1), -J(0, 1), -J(1, 0), J(0, 0);
    v = canonical_orientation(Jinv * v);
  }
  return v;
}

}  // namespace

Vec2 stable_direction(const MapSpec& spec, const TorusPoint& p, int depth) {
  if (depth < 1) throw InvalidSpec("stable_direction depth must be >= 1");
  if (spec.is_linear()) return linear_stable_direction(spec.A());
  return pull_back(spec, forward_orbit(spec, p, depth), depth);
}

Vec2 stable_direction(const MapSpec& spec, const TorusPoint& p) {
  if (spec.is_linear()) return linear_stable_direction(spec.A());
  constexpr int kMax = 60;
  const auto orb = forward_orbit(spec, p, kMax);
  Vec2 prev = pull_back(spec, orb, 1);
  double change = 1.0;
  for (int d = 2; d <= kMax; ++d) {
    const Vec2 v = pull_back(spec, orb, d);
    change = (v - prev).norm();
    prev = v;
    if (change < 1e-12) return v;
  }
  throw ConeDegeneracy("stable direction still moving at depth 60 (change " +
                       std::to_string(change) + ")");
}

Vec2 unstable_direction(const MapSpec& spec, const TorusPoint& p, int depth) {
  if (depth < 1) throw InvalidSpec("unstable_direction depth must be >= 1");
  if (spec.is_linear()) return linear_unstable_direction(spec.A());
  std::vector<Vec2> orb(depth + 1);
  TorusPoint q = p;
  for (int i = 0; i <= depth; ++i) {
    orb[i] = q.vec();
    if (i < depth) q = invert_map(spec, q);
  }
  Vec2 v = linear_unstable_direction(spec.A());
  for (int i = depth; i >= 1; --i) v = canonical_orientation(spec.jacobian_lift(orb[i]) * v);
  return v;
}

int calibrate_stable_depth(const MapSpec& spec, double tol) {
  if (spec.is_linear()) return 1;
  constexpr int kMax = 60;
  int worst = 1;
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      const TorusPoint p((i + 0.37) / 8.0, (j + 0.61) / 8.0);
      const auto orb = forward_orbit(spec, p, kMax);
      Vec2 prev = pull_back(spec, orb, 1);
      int d = 2;
      for (; d <= kMax; ++d) {
        const Vec2 v = pull_back(spec, orb, d);
        const double change = (v - prev).norm();
        prev = v;
        if (change < tol) break;
      }
      if (d > kMax) {
        // Machine precision floor: accept once the change stops decreasing.
        if (tol < 1e-12) return calibrate_stable_depth(spec, 1e-12);
        throw ConeDegeneracy("stable direction calibration exceeded depth 60");
      }
      worst = std::max(worst, d);
    }
  }
  return std::min(worst + 2, kMax);
}

double inverse_slope_action(const MapSpec& spec, const Vec2& x, double s) {
  const Vec2 y = spec.invert_lift(x);
  const Mat2 J = spec.jacobian_lift(y);
  // D_x F^{-1} = (D_y F)^{-1}.
  const double w1 = J(1, 1) - J(0, 1) * s;
  const double w2 = -J(1, 0) + J(0, 0) * s;
  return w2 / w1;
}

SlopeBracket stable_slope_bracket(const MapSpec& spec) {
  const Mat2& A = spec.A_real();
  // Projective image of the unstable half-line under A^{-1} lies between the
  // two coordinate images; [-a/b, -c/d] contains the stable slope.
  double lo = std::min(-A(0, 0) / A(0, 1), -A(1, 0) / A(1, 1));
  double hi = std::max(-A(0, 0) / A(0, 1), -A(1, 0) / A(1, 1));
  if (!spec.is_linear()) {
    constexpr int kGrid = 48;
    for (int round = 0; round < 50; ++round) {
      double nlo = lo, nhi = hi;
      for (int i = 0; i < kGrid; ++i) {
        for (int j = 0; j < kGrid; ++j) {
          const Vec2 x((i + 0.5) / kGrid, (j + 0.5) / kGrid);
          for (double s : {lo, hi}) {
            const double t = inverse_slope_action(spec, x, s);
            nlo = std::min(nlo, t);
            nhi = std::max(nhi, t);
          }
        }
      }
      const bool stable = nlo >= lo - 1e-14 && nhi <= hi + 1e-14;
      lo = nlo;
      hi = nhi;
      if (stable) break;
      if (round == 49) throw ConeDegeneracy("slope bracket does not stabilize");
    }
  }
  const double pad = 0.1 * (hi - lo);
  return {lo - pad, hi + pad};
}

double cone_invariance_margin(const MapSpec& spec, const SlopeBracket& b, int samples,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const Vec2 x(U(rng), U(rng));
    for (double s : {b.lo, b.hi}) {
      const double t = inverse_slope_action(spec, x, s);
      margin = std::min(margin, std::min(t - b.lo, b.hi - t));
    }
  }
  return margin;
}

std::int64_t fixed_point_count(const IMat2& A, int n) {
  const IMat2 M = ipow(A, n) - IMat2::Identity();
  return std::abs(M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0));
}

namespace {

std::vector<PeriodicOrbit> linear_periodic_points(const MapSpec& spec, int n) {
  const IMat2& A = spec.A();
  const IMat2 An = ipow(A, n);
  const IMat2 M = An - IMat2::Identity();
  const std::int64_t p = M(0, 0), q = M(0, 1), r = M(1, 0), s = M(1, 1);
  const std::int64_t det = p * s - q * r;
  const std::int64_t D = std::abs(det);
  const std::int64_t sgn = det > 0 ? 1 : -1;
  // Column reduction M U = [[g, 0], [r2, s2]] with U unimodular.
  std::int64_t u = 0, v = 0;
  const std::int64_t g = ext_gcd(p, q, u, v);
  const std::int64_t s2 = std::abs(-r * (q / g) + s * (p / g));

  std::vector<PeriodicOrbit> out;
  out.reserve(std::size_t(D));
  for (std::int64_t i = 0; i < g; ++i) {
    for (std::int64_t j = 0; j < s2; ++j) {
      // x = adj(M) m / det, kept as integer numerators modulo D.
      std::array<std::int64_t, 2> num{pmod(sgn * (s * i - q * j), D),
                                      pmod(sgn * (-r * i + p * j), D)};
      PeriodicOrbit orb;
      orb.period = n;
      orb.multiplier = An.cast<double>();
      // Lift class: M x with x the canonical representative, integral by construction.
      orb.lift_class = {(p * num[0] + q * num[1]) / D, (r * num[0] + s * num[1]) / D};
      orb.points.reserve(n);
      for (int k = 0; k < n; ++k) {
        orb.points.emplace_back(double(num[0]) / double(D), double(num[1]) / double(D));
        num = {pmod(A(0, 0) * num[0] + A(0, 1) * num[1], D),
               pmod(A(1, 0) * num[0] + A(1, 1) * num[1], D)};
      }
      out.push_back(std::move(orb));
    }
  }
  return out;
}

// Newton on F^n_lift(z) - z - m = 0; returns false on failure.
bool newton_periodic(const MapSpec& spec, int n, const Vec2& m, Vec2& z) {
  int polish = 1;
  for (int it = 0; it < 40; ++it) {
    Vec2 w = z;
    Mat2 J = Mat2::Identity();
    for (int k = 0; k < n; ++k) {
      J = spec.jacobian_lift(w) * J;
      w = spec.apply_lift(w);
    }
    const Vec2 res = w - z - m;
    if (!res.allFinite()) return false;
    const Vec2 step = (J - Mat2::Identity()).inverse() * res;
    z -= step;
    const double st = step.lpNorm<Eigen::Infinity>();
    // The residual floor is eps * lambda^n along the stable direction, so
    // stop on step size and take one polishing iteration.
    if (st < 1e-11 && (polish-- <= 0 || st < 1e-15)) return true;
    if (st > 0.25) return false;
  }
  return false;
}

// dz/dalpha along the branch F^n(z) - z - m = 0.
Vec2 periodic_tangent(const MapSpec& spec, int n, const Vec2& z) {
  Vec2 w = z, dw = Vec2::Zero();
  Mat2 J = Mat2::Identity();
  for (int k = 0; k < n; ++k) {
    const Mat2 Jk = spec.jacobian_lift(w);
    const Vec2 dF = spec.A_real() * Vec2(0.0, -std::sin(kTwoPi * w[0]) / kTwoPi);
    dw = Jk * dw + dF;
    J = Jk * J;
    w = spec.apply_lift(w);
  }
  return -(J - Mat2::Identity()).inverse() * dw;
}

}  // namespace

std::vector<PeriodicOrbit> periodic_points(const MapSpec& spec, int n) {
  if (n < 1) throw InvalidSpec("period must be >= 1");
  if (n > 20) throw InvalidSpec("period above 20 overflows exact enumeration");
  auto lin = linear_periodic_points(spec, n);
  if (spec.is_linear()) return lin;

  const double target = spec.alpha();
  std::vector<PeriodicOrbit> out;
  out.reserve(lin.size());
  for (const auto& L : lin) {
    Vec2 z = L.points.front().vec();
    const Vec2 m(double(L.lift_class[0]), double(L.lift_class[1]));
    double a = 0.0, h = 0.05;
    while (a < target) {
      const double next = std::min(target, a + h);
      Vec2 trial = z + (next - a) * periodic_tangent(spec.with_alpha(a), n, z);
      if (newton_periodic(spec.with_alpha(next), n, m, trial)) {
        z = trial;
        a = next;
        h = std::min(0.05, 2.0 * h);
      } else {
        if (h <= 1e-4) throw ContinuationFailure("periodic point continuation step underflow");
        h = std::max(0.5 * h, 1e-4);
      }
    }
    PeriodicOrbit orb;
    orb.period = n;
    orb.lift_class = L.lift_class;
    orb.multiplier = Mat2::Identity();
    orb.points.reserve(n);
    Vec2 w = z;
    for (int k = 0; k < n; ++k) {
      orb.points.push_back(TorusPoint::from_lift(w));
      orb.multiplier = spec.jacobian_lift(w) * orb.multiplier;
      w = spec.apply_lift(w);
    }
    out.push_back(std::move(orb));
  }

  // Drop duplicates; a continued branch landing on another one is kept once.
  std::vector<std::size_t> idx(out.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
    return out[i].points[0].x1 < out[j].points[0].x1;
  });
  std::vector<char> drop(out.size(), 0);
  for (std::size_t a = 0; a < idx.size(); ++a) {
    if (drop[idx[a]]) continue;
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      if (out[idx[b]].points[0].x1 - out[idx[a]].points[0].x1 > 1e-8) break;
      if (torus_distance(out[idx[a]].points[0], out[idx[b]].points[0]) < 1e-8) drop[idx[b]] = 1;
    }
    // Wrap-around near x1 = 1.
    if (out[idx[a]].points[0].x1 < 1e-8) {
      for (std::size_t b = idx.size(); b-- > a + 1;) {
        if (out[idx[b]].points[0].x1 < 1.0 - 1e-8) break;
        if (torus_distance(out[idx[a]].points[0], out[idx[b]].points[0]) < 1e-8) drop[idx[b]] = 1;
      }
    }
  }
  std::vector<PeriodicOrbit> kept;
  kept.reserve(out.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!drop[i]) kept.push_back(std::move(out[i]));
  return kept;
}

double topological_entropy(const MapSpec& spec) { return std::log(eigenvalues(spec.A()).second); }

DirectionGrid::DirectionGrid(const MapSpec& spec, int n, int depth) : n_(n), theta_(std::size_t(n) * n) {
  if (n < 2) throw InvalidSpec("direction grid needs n >= 2");
  const int d = depth > 0 ? depth : calibrate_stable_depth(spec);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 v = stable_direction(spec, TorusPoint(double(i) / n, double(j) / n), d);
      theta_[std::size_t(i) * n + j] = std::atan2(v[1], v[0]);
    }
  }
}

Vec2 DirectionGrid::operator()(const TorusPoint& p) const {
  const double u = p.x1 * n_, w = p.x2 * n_;
  const int i0 = int(u) % n_, j0 = int(w) % n_;
  const int i1 = (i0 + 1) % n_, j1 = (j0 + 1) % n_;
  const double fu = u - std::floor(u), fw = w - std::floor(w);
  auto at = [&](int i, int j) { return theta_[std::size_t(i) * n_ + j]; };
  const double th = (1 - fu) * (1 - fw) * at(i0, j0) + fu * (1 - fw) * at(i1, j0) +
                    (1 - fu) * fw * at(i0, j1) + fu * fw * at(i1, j1);
  return {std::cos(th), std::sin(th)};
}

}  // namespace renorm
