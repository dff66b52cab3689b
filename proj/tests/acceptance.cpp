// Acceptance battery: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "renorm/cli.hpp"
#include "renorm/cohomology.hpp"
#include "renorm/errors.hpp"
#include "renorm/forms.hpp"
#include "renorm/functionals.hpp"
#include "renorm/parallel.hpp"
#include "renorm/spectral.hpp"

#include "oracle_values.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>

using namespace renorm;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3e", v);
  return b;
}

VectorField field(double alpha) {
  return VectorField(VectorFieldSpec{MapSpec::cat(alpha), Observable::constant(1.0) + Observable::cosine({1, 0}, 0.3)});
}

const Observable kG = Observable::cosine({1, 1}) + Observable::sine({0, 1}, 0.5);

double nearest(const SpectralResult& r, double want) {
  double best = INFINITY;
  for (const auto& z : r.resonances) best = std::min(best, std::abs(z.rho - cplx(want)));
  return best;
}

cplx nearest_value(const SpectralResult& r, double want) {
  cplx best = INFINITY;
  for (const auto& z : r.resonances)
    if (std::abs(z.rho - want) < std::abs(best - want)) best = z.rho;
  return best;
}

Outcome renormalization_identity() {
  double worst = 0.0;
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (double alpha : {0.0, 0.1, 0.3}) {
    const VectorField vf = field(alpha);
    for (int i = 0; i < 50; ++i) {
      const Vec2 x(U(rng), U(rng));
      const double t = 50.0 * (1.0 - U(rng));
      const int n = n_t_pointwise(vf, x, t);
      const double tau = Cocycle(vf, x, n, t).tau(t);
      const TorusPoint p = TorusPoint::from_lift(x);
      worst = std::max(worst, torus_distance(iterate(vf.map(), flow(vf, p, t), n), flow(vf, iterate(vf.map(), p, n), tau)));
    }
  }
  return {worst <= 1e-6, "max torus distance " + sci(worst)};
}

Outcome cocycle_laws() {
  double wt = 0.0, wth = 0.0;
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (double alpha : {0.0, 0.1, 0.3}) {
    const VectorField vf = field(alpha);
    for (int n = 1; n <= 5; ++n)
      for (int m = 1; n + m <= 6; ++m) {
        const Vec2 x(U(rng), U(rng));
        const double s = 10.0 * (1.0 - U(rng));
        const Cocycle Cn(vf, x, n, s), Cnm(vf, x, n + m, s);
        const double tn = Cn.tau(s), tnm = Cnm.tau(s);
        const Cocycle Cm(vf, Cn.image(), m, tn);
        wt = std::max(wt, std::abs(Cm.tau(tn) - tnm));
        const Mat2 d = Cnm.theta(tnm) - Cm.theta(Cm.tau(tn)) * Cn.theta(tn);
        wth = std::max(wth, d.cwiseAbs().maxCoeff() / std::max(1.0, Cnm.theta(tnm).cwiseAbs().maxCoeff()));
      }
  }
  return {wt <= 1e-6 && wth <= 1e-6, "tau law " + sci(wt) + ", Theta law " + sci(wth) + " (entrywise, relative to max entry)"};
}

Outcome linear_traces() {
  const TraceSequence ts = trace_sequence(ExtMapSpec(MapSpec::cat(0.0)), 10);
  double rel = 0.0;
  for (int n = 1; n <= 10; ++n) rel = std::max(rel, std::abs(ts.values[std::size_t(n - 1)] / oracle::kTrace[n - 1] - 1.0));
  const double d1 = std::abs(ts.values[0] - oracle::kTrace[0]);
  return {d1 <= 1e-9 && rel <= 1e-9, "T_1 error " + sci(d1) + ", max rel error n<=10 " + sci(rel) + ", |Fix F^10| = " +
                                         std::to_string(ts.counts.back())};
}

Outcome linear_spectrum() {
  const MapSpec m = MapSpec::cat(0.0);
  const ExtMapSpec e(m);
  const VectorField vf(VectorFieldSpec{m});
  const SpectralResult det = resonances_from_determinant(trace_sequence(e, 10), oracle::kHTop);
  double gd = 0.0, gg = 0.0, agree = 0.0, energy = INFINITY;
  for (int k = 0; k < 3; ++k) gd = std::max(gd, nearest(det, oracle::kResonance[k]));
  for (int K : {16, 24}) {
    const GalerkinMatrix G = galerkin_matrix(e, vf, K, K);
    const auto eig = galerkin_eigs(G, 0.05);
    SpectralResult r;
    for (const auto& p : eig) r.resonances.push_back({p.value, 0.0, 0.0});
    for (int k = 0; k < 3; ++k) {
      gg = std::max(gg, nearest(r, oracle::kResonance[k]));
      const cplx a = nearest_value(det, oracle::kResonance[k]), b = nearest_value(r, oracle::kResonance[k]);
      agree = std::max(agree, std::abs(a - b) / std::abs(a));
    }
    for (const auto& p : eig)
      if (std::abs(p.value - oracle::kLambda) < 1e-6) energy = std::min(energy, off_zero_energy(G, p));
  }
  const bool ok = gd <= 1e-6 && gg <= 1e-6 && agree <= 1e-4 && energy < 1e-8;
  return {ok, "determinant " + sci(gd) + ", galerkin(16,24) " + sci(gg) + ", pipeline rel gap " + sci(agree) +
                  ", leading off-mode energy " + sci(energy)};
}

Outcome spectral_radius() {
  const double r0 = std::abs(resonances_from_determinant(trace_sequence(ExtMapSpec(MapSpec::cat(0.0)), 8), oracle::kHTop)
                                 .resonances.at(0)
                                 .rho);
  const double r1 = std::abs(resonances_from_determinant(trace_sequence(ExtMapSpec(MapSpec::cat(0.1)), 8), oracle::kHTop)
                                 .resonances.at(0)
                                 .rho);
  const double e = std::exp(oracle::kHTop);
  return {std::abs(r0 - e) <= 1e-6 && std::abs(r1 - e) <= 1e-3,
          "alpha 0: " + sci(std::abs(r0 - e)) + ", alpha 0.1: " + sci(std::abs(r1 - e))};
}

Outcome growth() {
  const VectorField vf(VectorFieldSpec{MapSpec::cat(0.0)});
  const std::vector<Vec2> xs{{0.13, 0.27}, {0.52, 0.71}, {0.88, 0.05}};
  const double s1 = growth_exponent(vf, Observable::constant(0.7) + Observable::cosine({1, 0}), xs, 10, 1e4).slope;
  const double s0 = growth_exponent(vf, kG, xs, 10, 1e4).slope;
  return {std::abs(s1 - 1.0) <= 0.01 && s0 <= 0.05,
          "slope with mean " + std::to_string(s1) + ", mean zero " + std::to_string(s0)};
}

Outcome nt_bracket() {
  double worst = 0.0;
  std::vector<double> ts;
  for (int i = 0; i <= 40; ++i) ts.push_back(10.0 * std::pow(1e4, i / 40.0));
  for (double alpha : {0.0, 0.2}) {
    const VectorField vf = field(alpha);
    for (const Vec2& x : {Vec2(0.21, 0.64), Vec2(0.77, 0.38)}) {
      const TauProfile p = tau_levels(vf, x, ts);
      for (std::size_t i = 0; i < ts.size(); ++i) {
        int nt = -1;
        for (int n = 0; n <= p.levels; ++n)
          if (p.tau[i][std::size_t(n)] < 1.0) {
            nt = n;
            break;
          }
        if (nt < 0) return {false, "n_t beyond tracked levels at t = " + sci(ts[i])};
        worst = std::max(worst, std::abs(nt - std::log(ts[i]) / oracle::kHTop));
      }
    }
  }
  return {worst <= 5.0, "max |n_t - ln t / h_top| = " + std::to_string(worst)};
}

Outcome decomposition() {
  double worst = 0.0;
  bool k_ok = true;
  std::mt19937_64 rng(108);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const VectorField vf = field(i % 2 ? 0.2 : 0.0);
    const Vec2 x(U(rng), U(rng));
    const double t = 10.0 * std::pow(10.0, U(rng));
    const Decomposition D = decompose(vf, x, t);
    k_ok = k_ok && D.K <= D.n_t;
    const double H = ergodic_integral(vf, x, t, kG);
    worst = std::max(worst, std::abs(reconstruct(vf, D, as_field(kG)) - H) / std::max(1.0, std::abs(H)));
  }
  return {worst <= 1e-6 && k_ok, "max reconstruction error " + sci(worst) + (k_ok ? ", K <= n_t on all" : ", K > n_t seen")};
}

Outcome coboundary() {
  const VectorField vf(VectorFieldSpec{MapSpec::cat(0.0)});
  const Vec2 V = vf(Vec2::Zero());
  const Observable g = Observable::sine({1, 1});
  const Observable h = fourier_solve(g, V);
  const double res = homology_residual(h, g, V, 1000, 9);
  const double fit = affine_fit(coboundary_estimate(vf, g, 1e3, 32).H, h).residual;
  const auto prof = coboundary_sup_profile(vf, g, {10, 30, 100, 300, 1e3, 3e3, 1e4}, 32);
  return {res <= 1e-10 && fit <= 1e-2 && prof.last_decade_growth < 0.01,
          "pointwise " + sci(res) + ", affine fit " + sci(fit) + ", last-decade growth " + sci(prof.last_decade_growth)};
}

Outcome form_identities() {
  double ww = 0.0, wg = 0.0, wfd = 0.0;
  std::string fd_detail;
  const VectorWindow w = [](double s) { return Vec2(std::sin(M_PI * s), 0.3 * s * (1 - s)); };
  std::mt19937_64 rng(110);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (double alpha : {0.0, 0.1, 0.3}) {
    const VectorField vf = field(alpha);
    const ExtMapSpec e(vf.map());
    for (int n = 1; n <= 2; ++n) {
      const Vec2 x(U(rng), U(rng));
      const double a = 2 * M_PI * U(rng);
      ww = std::max(ww, h1_window_transfer(e, vf, lift_differential(kG), x, n, w).residual());
      wg = std::max(wg, gradient_transfer(e, vf, kG, x, Vec2(std::cos(a), std::sin(a)), 5.0 * U(rng) + 0.5, n).residual());
    }
    const Vec2 x(U(rng), U(rng));
    const double t = 6.0;
    const Vec2 grad = gradient_ergodic_integral(vf, x, t, kG, 1e-12);
    auto fd_gap = [&](double hh) {
      double gap = 0.0;
      for (const Vec2& v : {Vec2(1, 0), Vec2(0, 1)}) {
        const double fd =
            (ergodic_integral(vf, x + hh * v, t, kG, 1e-12) - ergodic_integral(vf, x - hh * v, t, kG, 1e-12)) / (2 * hh);
        gap = std::max(gap, std::abs(grad.dot(v) - fd));
      }
      return gap;
    };
    const double gap = fd_gap(1e-5);
    wfd = std::max(wfd, gap);
    // Not part of the verdict: the h = 1e-6 gap separates truncation error from a wrong gradient.
    fd_detail += " a=" + std::to_string(alpha).substr(0, 3) + ":" + sci(gap) + "/" + sci(fd_gap(1e-6));
  }
  return {ww <= 1e-5 && wg <= 1e-4 && wfd <= 1e-4, "window transfer " + sci(ww) + ", gradient transfer " + sci(wg) +
                                                       ", gradient vs FD(h=1e-5) " + sci(wfd) + " [per alpha, h=1e-5/1e-6:" +
                                                       fd_detail + "]"};
}

Outcome rotation() {
  const double r0 = rotation_number(VectorField(VectorFieldSpec{MapSpec::cat(0.0)}), 0, 1000).residual;
  const double r2 = rotation_number(field(0.2), 0, 10000).residual;
  return {r0 <= 1e-9 && r2 <= 1e-3, "alpha 0: " + sci(r0) + ", alpha 0.2 (1e4 returns): " + sci(r2)};
}

Outcome determinism() {
  std::vector<std::string> configs = {
      R"({"schema_version": 1, "experiment": "spectrum", "map": {"alpha": 0.0}, "seed": 1})",
      R"({"schema_version": 1, "experiment": "identities", "map": {"alpha": 0.1},
          "params": {"samples": 10, "t_max": 20}, "seed": 4})",
      R"({"schema_version": 1, "experiment": "growth", "map": {"alpha": 0.0},
          "observables": [{"name": "g", "terms": [{"type": "cos", "k": [1, 1]}]}],
          "params": {"t1": 1000, "growth_samples": 10}, "seed": 2})"};
  std::size_t files = 0;
  for (std::size_t k = 0; k < configs.size(); ++k) {
    std::map<std::string, std::string> first;
    for (int run = 0; run < 2; ++run) {
      auto c = cli::parse_config(nlohmann::json::parse(configs[k]));
      c.out_dir = (fs::temp_directory_path() / ("renorm_acceptance_" + std::to_string(k) + "_" + std::to_string(run))).string();
      fs::remove_all(c.out_dir);
      set_thread_count(run == 0 ? 1 : 4);  // worker count must not matter
      cli::run(c);
      std::map<std::string, std::string> got;
      for (const auto& f : fs::directory_iterator(c.out_dir)) got[f.path().filename().string()] = read_file(f.path().string());
      if (run == 0) first = got;
      else if (got != first) return {false, "outputs differ for config " + std::to_string(k)};
      files += got.size();
    }
  }
  set_thread_count(1);
  return {true, std::to_string(files / 2) + " files byte-identical across runs with 1 and 4 workers"};
}

Outcome sweep_continuity() {
  // Literal criterion: adjacent-step change of every retained resonance within 10x its stability error.
  struct Step {
    double alpha;
    SpectralResult det, gal;
  };
  std::vector<Step> steps;
  for (int i = 0; i <= 30; ++i) {
    const double a = 0.01 * i;
    const VectorField vf = field(a);
    const ExtMapSpec e(vf.map());
    steps.push_back({a, resonances_from_determinant(trace_sequence(e, 10), oracle::kHTop),
                     galerkin_spectrum(e, vf, oracle::kHTop)});
  }
  auto check = [&](bool gal, double* worst_ratio, int* violations) {
    *worst_ratio = 0.0;
    *violations = 0;
    for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
      const auto& A = gal ? steps[i].gal.resonances : steps[i].det.resonances;
      const auto& B = gal ? steps[i + 1].gal.resonances : steps[i + 1].det.resonances;
      auto nearest_in = [](const cplx& r, const std::vector<Resonance>& set) {
        const Resonance* best = nullptr;
        for (const auto& y : set)
          if (!best || std::abs(y.rho - r) < std::abs(best->rho - r)) best = &y;
        return best;
      };
      for (const auto& z : A) {
        const Resonance* y = nearest_in(z.rho, B);
        if (!y || nearest_in(y->rho, A) != &z) continue;
        const double ratio = std::abs(y->rho - z.rho) / (10.0 * std::max(z.err, y->err));
        *worst_ratio = std::max(*worst_ratio, ratio);
        if (ratio > 1.0) ++*violations;
      }
    }
  };
  double rd, rg;
  int vd, vg;
  check(false, &rd, &vd);
  check(true, &rg, &vg);
  return {vd == 0 && vg == 0, "determinant: " + std::to_string(vd) + " jumps (worst jump/(10 err) " + sci(rd) +
                                  "), galerkin: " + std::to_string(vg) + " jumps (worst " + sci(rg) + ")"};
}

}  // namespace

int main() {
  struct Criterion {
    std::string name;
    std::function<Outcome()> fn;
    double budget;  ///< seconds; part of the verdict, infinite when none is stated
  };
  const std::vector<Criterion> criteria = {
      {"1  renormalization identity", renormalization_identity, 60},
      {"2  cocycle laws", cocycle_laws, 60},
      {"3  linear trace formula", linear_traces, 30},
      {"4  linear spectrum", linear_spectrum, 120},
      {"5  spectral radius bridge", spectral_radius, 300},
      {"6  growth exponents", growth, 180},
      {"7  n_t bracket", nt_bracket, 60},
      {"8  decomposition reconstruction", decomposition, 120},
      {"9  coboundary suite", coboundary, 300},
      {"10 gradient and one-form identities", form_identities, 120},
      {"11 rotation-number residual", rotation, 120},
      {"12 determinism", determinism, INFINITY},
      {"13 alpha-sweep continuity", sweep_continuity, INFINITY},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget;
    const bool pass = o.pass && in_time;
    std::string timing = std::isfinite(c.budget) ? " / " + std::to_string(int(c.budget)) + " s budget" : "";
    if (!in_time) timing += ", over budget";
    std::printf("%s criterion %s: %s [%.1f s%s]\n", pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(), secs,
                timing.c_str());
    std::fflush(stdout);
    failed += pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
