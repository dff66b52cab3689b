#include "renorm/errors.hpp"
#include "renorm/parallel.hpp"
#include "renorm/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace renorm {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct LoopTerm {
  double value = 0.0;
  double det = 0.0;
};

// Backward loop x_0 <- x_{n-1} <- ... <- x_1 <- x_0 acting on slopes.
LoopTerm loop_term(const ExtMapSpec& e, const PeriodicOrbit& orb) {
  const int n = orb.period;
  std::vector<Mat2> J(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) J[std::size_t(j)] = e.base().jacobian_lift(orb.points[std::size_t(j)].vec());
  auto step = [&](int j, double s, double* first) {
    const Mat2& D = J[std::size_t(j)];
    const double w1 = D(1, 1) - D(0, 1) * s;
    const double w2 = -D(1, 0) + D(0, 0) * s;
    if (first) *first = w1;
    return w2 / w1;
  };
  double s = e.bracket().mid();
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    double t = s;
    for (int j = n - 1; j >= 0; --j) t = step(j, t, nullptr);
    const double ds = std::abs(t - s);
    s = t;
    if (ds < 1e-13) {
      converged = true;
      break;
    }
  }
  if (!converged || !e.in_bracket(s))
    throw FiberNonConvergence("fiber slope did not settle for a period-" + std::to_string(n) + " point");
  double W = 1.0, q = 1.0;
  double t = s;
  for (int j = n - 1; j >= 0; --j) {
    double w1 = 0.0;
    t = step(j, t, &w1);
    W *= std::abs(w1);
    q /= w1 * w1;  // derivative of a unimodular Moebius slope map
  }
  const double det = std::abs(2.0 - orb.multiplier.trace());
  return {W / (det * std::abs(1.0 - q)), det};
}

}  // namespace

double orbit_trace(const ExtMapSpec& e, int n, double* err, long* count, double* min_det) {
  if (n < 1) throw InvalidSpec("orbit_trace needs n >= 1");
  const auto orbits = periodic_points(e.base(), n);
  std::vector<LoopTerm> terms(orbits.size());
  parallel_for(orbits.size(), [&](std::size_t i) { terms[i] = loop_term(e, orbits[i]); });
  // Neumaier summation keeps the sum error at O(eps) independent of the count.
  double sum = 0.0, comp = 0.0, abs_sum = 0.0, dmin = std::numeric_limits<double>::infinity();
  for (const auto& t : terms) {
    const double v = t.value, s = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - s) + v : (v - s) + sum;
    sum = s;
    abs_sum += std::abs(v);
    dmin = std::min(dmin, t.det);
  }
  sum += comp;
  // Each term is a product of about 2n rounded factors.
  if (err) *err = 8.0 * n * kEps * abs_sum;
  if (count) *count = long(orbits.size());
  if (min_det) *min_det = dmin;
  return sum;
}

TraceSequence trace_sequence(const ExtMapSpec& e, int N) {
  TraceSequence ts;
  for (int n = 1; n <= N; ++n) {
    double err = 0.0, dmin = 0.0;
    long cnt = 0;
    ts.values.push_back(orbit_trace(e, n, &err, &cnt, &dmin));
    ts.errors.push_back(err);
    ts.counts.push_back(cnt);
    ts.min_det.push_back(dmin);
  }
  return ts;
}

std::vector<double> determinant_coeffs(const TraceSequence& traces, std::vector<double>* noise) {
  const std::size_t N = traces.values.size();
  std::vector<double> c(N + 1, 0.0), e(N + 1, 0.0);
  c[0] = 1.0;
  for (std::size_t m = 1; m <= N; ++m) {
    double acc = 0.0, bound = 0.0;
    for (std::size_t j = 1; j <= m; ++j) {
      const double T = traces.values[j - 1];
      const double dT = j - 1 < traces.errors.size() ? traces.errors[j - 1] : 0.0;
      acc += T * c[m - j];
      bound += std::abs(T) * e[m - j] + dT * std::abs(c[m - j]) + 2.0 * kEps * std::abs(T * c[m - j]);
    }
    c[m] = -acc / double(m);
    e[m] = bound / double(m);
  }
  if (noise) *noise = e;
  return c;
}

namespace {

// Reciprocals of the zeros of sum_m c_m z^m via the companion matrix.
std::vector<cplx> reciprocal_roots(const std::vector<double>& c) {
  const std::size_t d = c.size() - 1;
  if (d == 0) return {};
  // Zeros of p(z) are reciprocals of the zeros of z^d p(1/z) = sum c_m z^{d-m}, monic in z.
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(Eigen::Index(d), Eigen::Index(d));
  for (std::size_t i = 0; i < d; ++i) C(0, Eigen::Index(i)) = -c[i + 1] / c[0];
  for (std::size_t i = 1; i < d; ++i) C(Eigen::Index(i), Eigen::Index(i - 1)) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
  std::vector<cplx> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()[i]);
  return out;
}

std::vector<double> trim_to_noise(std::vector<double> c, const std::vector<double>& noise) {
  while (c.size() > 1 && std::abs(c.back()) <= 10.0 * noise[c.size() - 1]) c.pop_back();
  return c;
}

}  // namespace

SpectralResult resonances_from_determinant(const TraceSequence& traces, double h_top,
                                           double cutoff, double rel_stable) {
  SpectralResult res;
  res.method = "determinant";
  res.cutoff = cutoff;
  res.traces = traces.values;
  if (traces.values.size() < 2) return res;
  std::vector<double> noise;
  const auto c = determinant_coeffs(traces, &noise);
  // Orders N and N - 1 are counted after dropping coefficients at the noise floor.
  const auto c_hi = trim_to_noise(c, noise);
  if (c_hi.size() < 3) return res;
  const auto hi = reciprocal_roots(c_hi);
  const auto lo = reciprocal_roots(std::vector<double>(c_hi.begin(), c_hi.end() - 1));
  for (const cplx& r : hi) {
    if (std::abs(r) < cutoff) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const cplx& q : lo) best = std::min(best, std::abs(r - q));
    if (best > rel_stable * std::abs(r)) continue;
    res.resonances.push_back({r, std::log(std::abs(r)) / h_top, best});
  }
  std::sort(res.resonances.begin(), res.resonances.end(), [](const Resonance& a, const Resonance& b) {
    if (std::abs(a.rho) != std::abs(b.rho)) return std::abs(a.rho) > std::abs(b.rho);
    return a.rho.imag() > b.rho.imag();
  });
  return res;
}

cplx ObstructionFunctional::operator()(const Observable& g) const {
  cplx acc = 0.0;
  for (const auto& [k, w] : weights) acc += w * g.coeff(k);
  return acc;
}

}  // namespace renorm
