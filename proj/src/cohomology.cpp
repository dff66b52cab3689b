#include "renorm/cohomology.hpp"

#include "renorm/errors.hpp"
#include "renorm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace renorm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double dot(const Mode& k, const Vec2& V) { return k.first * V[0] + k.second * V[1]; }

bool obstructed(const Observable& g, const std::vector<ObstructionFunctional>* obs, double tol,
                double* size) {
  double s = std::abs(g.mean());
  if (obs)
    for (const auto& O : *obs) s = std::max(s, std::abs(O(g)));
  if (size) *size = s;
  return s > tol * std::max(1.0, g.sup_bound());
}

std::vector<Vec2> grid_points(int n) {
  std::vector<Vec2> xs;
  xs.reserve(std::size_t(n) * std::size_t(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) xs.emplace_back(double(i) / n, double(j) / n);
  return xs;
}

}  // namespace

Observable fourier_solve(const Observable& g, const Vec2& V) {
  if (std::abs(g.coeff({0, 0})) > 0.0) throw MeanNotZero("g has a nonzero mean; no coboundary exists");
  Observable h;
  for (const auto& [k, c] : g.coeffs()) {
    if (k.second < 0 || (k.second == 0 && k.first <= 0)) continue;  // add() fills -k
    if (c == cplx(0.0)) continue;
    const double w = dot(k, V);
    if (w == 0.0) throw InvalidSpec("resonant mode <V, k> = 0 in the support of g");
    h.add(k, cplx(0.0, -1.0) * c / (kTwoPi * w));
  }
  return h;
}

double homology_residual(const Observable& h, const Observable& g, const Vec2& V, int samples,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double r = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Vec2 x(U(rng), U(rng));
    r = std::max(r, std::abs(V.dot(h.gradient(x)) - g(x)));
  }
  return r;
}

SmallDivisorProfile small_divisor_profile(double omega, int K) {
  if (K < 1) throw InvalidSpec("small_divisor_profile needs K >= 1");
  SmallDivisorProfile p;
  p.min.product = std::numeric_limits<double>::infinity();
  for (int k2 = 0; k2 <= K; ++k2) {
    for (int k1 = (k2 == 0 ? 1 : -K); k1 <= K; ++k1) {
      const double d = std::abs(k1 + omega * k2);
      const SmallDivisor s{{k1, k2}, d, std::max(std::abs(k1), k2) * d};
      p.table.push_back(s);
      if (s.product < p.min.product) p.min = s;
    }
  }
  return p;
}

double GridFunction::sup() const {
  double s = 0.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

CoboundaryEstimate coboundary_estimate(const VectorField& vf, const Observable& g, double T, int grid,
                                       const std::vector<ObstructionFunctional>* obstructions,
                                       const Mollifier& chi, double obstruction_tol) {
  if (grid < 1) throw InvalidSpec("grid must be >= 1");
  if (!(T > 0.0)) throw InvalidSpec("T must be positive");
  CoboundaryEstimate est;
  est.T = T;
  est.obstruction_nonzero = obstructed(g, obstructions, obstruction_tol, &est.obstruction_size);
  est.n_T = renormalization_depth(vf, T);
  est.H.n = grid;
  const auto xs = grid_points(grid);
  if (vf.is_constant()) {
    est.H.values = renormalized_average_batch(vf, g, est.n_T, chi, xs);
  } else {
    est.H.values.assign(xs.size(), 0.0);
    parallel_for(xs.size(), [&](std::size_t i) {
      est.H.values[i] = renormalized_average(vf, g, est.n_T, chi, xs[i]);
    });
  }
  return est;
}

AffineFit affine_fit(const GridFunction& H, const Observable& ref) {
  const std::size_t N = H.values.size();
  if (N == 0) throw InvalidSpec("empty grid function");
  std::vector<double> r(N);
  for (int i = 0; i < H.n; ++i)
    for (int j = 0; j < H.n; ++j) r[std::size_t(i * H.n + j)] = ref(H.point(i, j));
  double mh = 0.0, mr = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    mh += H.values[i];
    mr += r[i];
  }
  mh /= double(N);
  mr /= double(N);
  double shr = 0.0, shh = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    shr += (H.values[i] - mh) * (r[i] - mr);
    shh += (H.values[i] - mh) * (H.values[i] - mh);
  }
  AffineFit f;
  f.scale = shh > 0.0 ? shr / shh : 0.0;
  f.offset = mr - f.scale * mh;
  // The residual fixes the scale at 1: only the additive constant is free.
  const double c = mh - mr;
  for (std::size_t i = 0; i < N; ++i) f.residual = std::max(f.residual, std::abs(H.values[i] - r[i] - c));
  return f;
}

double coboundary_defect(const VectorField& vf, const Observable& g, const CoboundaryEstimate& est,
                         int stride, const Mollifier& chi) {
  if (stride < 1) throw InvalidSpec("stride must be >= 1");
  std::vector<Vec2> xs;
  for (int i = 0; i < est.H.n; i += stride)
    for (int j = 0; j < est.H.n; j += stride) xs.push_back(est.H.point(i, j));
  std::vector<double> d(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) {
    const Vec2 grad = renormalized_average_gradient(vf, g, est.n_T, chi, xs[i]);
    d[i] = std::abs(vf(xs[i]).dot(grad) - g(xs[i]));
  });
  return d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
}

BoundednessProfile coboundary_sup_profile(const VectorField& vf, const Observable& g,
                                          const std::vector<double>& T_list, int grid,
                                          const Mollifier& chi) {
  if (T_list.empty() || !std::is_sorted(T_list.begin(), T_list.end()))
    throw InvalidSpec("T_list must be nonempty and ascending");
  BoundednessProfile p;
  p.T = T_list;
  double run = 0.0;
  for (double T : T_list) {
    const double s = coboundary_estimate(vf, g, T, grid, nullptr, chi).H.sup();
    run = std::max(run, s);
    p.sup.push_back(s);
    p.running_max.push_back(run);
  }
  const double T_last = T_list.back();
  double base = p.running_max.back();
  for (std::size_t i = 0; i < T_list.size(); ++i)
    if (T_list[i] >= T_last / 10.0) {
      base = p.running_max[i];
      break;
    }
  p.last_decade_growth = base > 0.0 ? (p.running_max.back() - base) / base : 0.0;
  return p;
}

LipschitzReport lipschitz_diagnostic(const VectorField& vf, const Observable& g,
                                     const std::vector<double>& T_list, int grid,
                                     const Mollifier& chi) {
  if (T_list.size() < 2) throw InvalidSpec("lipschitz_diagnostic needs at least two times");
  if (grid < 1) throw InvalidSpec("grid must be >= 1");
  LipschitzReport rep;
  rep.T = T_list;
  rep.obstruction_nonzero = obstructed(g, nullptr, 1e-10, nullptr);
  const auto xs = grid_points(grid);
  for (double T : T_list) {
    const int n_T = renormalization_depth(vf, T);
    std::vector<double> v(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) {
      v[i] = renormalized_average_gradient(vf, g, n_T, chi, xs[i]).norm();
    });
    rep.sup_gradient.push_back(*std::max_element(v.begin(), v.end()));
  }
  rep.trend_slope = loglog_slope(rep.T, rep.sup_gradient);
  rep.bounded = rep.trend_slope <= 0.05;
  return rep;
}

}  // namespace renorm
