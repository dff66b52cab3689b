#include "renorm/errors.hpp"
#include "renorm/parallel.hpp"
#include "renorm/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <random>

namespace renorm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Owns a 1D complex plan usable from several threads with fftw_execute_dft.
class Fft1 {
 public:
  explicit Fft1(int n) : n_(n) {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    auto* in = fftw_alloc_complex(std::size_t(n));
    auto* out = fftw_alloc_complex(std::size_t(n));
    plan_ = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
  }
  ~Fft1() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Fft1(const Fft1&) = delete;
  Fft1& operator=(const Fft1&) = delete;
  void run(std::vector<cplx>& in, std::vector<cplx>& out) const {
    fftw_execute_dft(plan_, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
  }

 private:
  int n_;
  fftw_plan plan_;
};

double chebyshev_T(int p, double u) {
  double t0 = 1.0, t1 = u;
  if (p == 0) return t0;
  for (int q = 1; q < p; ++q) {
    const double t2 = 2.0 * u * t1 - t0;
    t0 = t1;
    t1 = t2;
  }
  return t1;
}

struct ModeBox {
  int R;
  int side() const { return 2 * R + 1; }
  int count() const { return side() * side(); }
  bool contains(long a, long b) const { return std::abs(a) <= R && std::abs(b) <= R; }
  int index(long a, long b) const { return int((a + R) * side() + (b + R)); }
};

// Fourier coefficients of 1/h, h = |V_1|, for |j_i| <= radius.
std::vector<cplx> inverse_norm_coeffs(const VectorField& vf, int radius) {
  const int n = std::max(64, 4 * radius + 8);
  std::vector<double> vals(std::size_t(n) * std::size_t(n));
  parallel_for(vals.size(), [&](std::size_t ij) {
    const Vec2 x(double(ij / std::size_t(n)) / n, double(ij % std::size_t(n)) / n);
    vals[ij] = 1.0 / std::abs(vf(x)[0]);
  });
  std::vector<cplx> in(vals.begin(), vals.end()), out(vals.size());
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_plan p = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(in.data()),
                                   reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
                                   FFTW_ESTIMATE);
    fftw_execute(p);
    fftw_destroy_plan(p);
  }
  const int side = 2 * radius + 1;
  std::vector<cplx> c(std::size_t(side) * std::size_t(side));
  for (int a = -radius; a <= radius; ++a)
    for (int b = -radius; b <= radius; ++b) {
      const int ia = (a + n) % n, ib = (b + n) % n;
      c[std::size_t((a + radius) * side + (b + radius))] =
          out[std::size_t(ia) * std::size_t(n) + std::size_t(ib)] / double(n * n);
    }
  return c;
}

}  // namespace

GalerkinMatrix galerkin_matrix(const ExtMapSpec& e, const VectorField& vf, int K, int M,
                               const GalerkinOptions& opt) {
  if (K < 8 || M < 8) throw InvalidSpec("galerkin_matrix needs K, M >= 8");
  const ModeBox box{K / 2 - 1};
  const long dim = long(box.count()) * M;
  if (dim > opt.max_dim)
    throw SizeOverflow("Galerkin dimension " + std::to_string(dim) + " exceeds " +
                       std::to_string(opt.max_dim));
  const MapSpec& map = e.base();
  const double a = map.A_real()(0, 0), b = map.A_real()(0, 1), c = map.A_real()(1, 0),
               d = map.A_real()(1, 1);
  const IMat2& A = map.A();
  // A^{-T} with det A = 1.
  const std::int64_t t00 = A(1, 1), t01 = -A(1, 0), t10 = -A(0, 1), t11 = A(0, 0);
  const double alpha = map.alpha();
  const SlopeBracket br = e.bracket();
  const int Q = opt.fft;

  GalerkinMatrix G;
  G.K = K;
  G.M = M;
  G.bracket = br;
  for (int k1 = -box.R; k1 <= box.R; ++k1)
    for (int k2 = -box.R; k2 <= box.R; ++k2) G.modes.push_back({k1, k2});

  std::vector<double> s_node(static_cast<std::size_t>(M)), u_node(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) {
    u_node[std::size_t(i)] = std::cos(std::numbers::pi * (i + 0.5) / M);
    s_node[std::size_t(i)] = br.mid() + 0.5 * br.width() * u_node[std::size_t(i)];
  }
  auto to_u = [&](double s) { return (2.0 * s - br.lo - br.hi) / br.width(); };

  // coef[(k2, p)][m * M + q]: Chebyshev q of the z_1-mode m of the image of e_{(0,k2)} T_p.
  const int side = box.side();
  std::vector<std::vector<cplx>> coef(std::size_t(side) * std::size_t(M));
  Fft1 fft(Q);
  parallel_for(coef.size(), [&](std::size_t idx) {
    const int k2 = int(idx / std::size_t(M)) - box.R;
    const int p = int(idx % std::size_t(M));
    std::vector<cplx> in(static_cast<std::size_t>(Q)), out(static_cast<std::size_t>(Q));
    std::vector<cplx> cm(std::size_t(Q) * std::size_t(M));  // [m][i]
    for (int i = 0; i < M; ++i) {
      const double s = s_node[std::size_t(i)];
      const double sig = (a * s - c) / (d - b * s);
      const double w = d - b * s;
      for (int n = 0; n < Q; ++n) {
        const double z = double(n) / Q;
        const double sp = sig + alpha * std::cos(kTwoPi * z);
        in[std::size_t(n)] = w * chebyshev_T(p, to_u(sp)) *
                             std::polar(1.0, k2 * alpha * std::sin(kTwoPi * z)) / double(Q);
      }
      fft.run(in, out);
      for (int n = 0; n < Q; ++n) cm[std::size_t(n) * std::size_t(M) + std::size_t(i)] = out[std::size_t(n)];
    }
    auto& dst = coef[idx];
    dst.assign(std::size_t(Q) * std::size_t(M), cplx(0.0));
    for (int n = 0; n < Q; ++n)
      for (int q = 0; q < M; ++q) {
        cplx acc = 0.0;
        for (int i = 0; i < M; ++i)
          acc += cm[std::size_t(n) * std::size_t(M) + std::size_t(i)] *
                 std::cos(q * std::numbers::pi * (i + 0.5) / M);
        dst[std::size_t(n) * std::size_t(M) + std::size_t(q)] = acc * ((q == 0 ? 1.0 : 2.0) / M);
      }
  });

  std::vector<Eigen::Triplet<cplx>> trip;
  for (int k1 = -box.R; k1 <= box.R; ++k1)
    for (int k2 = -box.R; k2 <= box.R; ++k2)
      for (int p = 0; p < M; ++p) {
        const auto& C = coef[std::size_t(k2 + box.R) * std::size_t(M) + std::size_t(p)];
        double cmax = 0.0;
        for (const cplx& v : C) cmax = std::max(cmax, std::abs(v));
        const int col = box.index(k1, k2) * M + p;
        for (int n = 0; n < Q; ++n) {
          const long m = (2 * n < Q) ? n : n - Q;
          const long j1 = t00 * (k1 + m) + t01 * k2, j2 = t10 * (k1 + m) + t11 * k2;
          if (!box.contains(j1, j2)) continue;
          for (int q = 0; q < M; ++q) {
            const cplx v = C[std::size_t(n) * std::size_t(M) + std::size_t(q)];
            if (std::abs(v) <= opt.drop * cmax) continue;
            trip.emplace_back(box.index(j1, j2) * M + q, col, v);
          }
        }
      }
  G.L0.resize(dim, dim);
  G.L0.setFromTriplets(trip.begin(), trip.end());
  G.L0.makeCompressed();
  G.inv_h_radius = 2 * box.R;
  G.inv_h = inverse_norm_coeffs(vf, G.inv_h_radius);
  return G;
}

namespace {

// Tarjan on the mode graph; components come out sinks first.
std::vector<std::vector<int>> mode_components(const GalerkinMatrix& G) {
  const int nm = int(G.modes.size());
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(nm));
  for (int col = 0; col < G.L0.outerSize(); ++col)
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(G.L0, col); it; ++it) {
      auto& v = adj[std::size_t(col / G.M)];
      const int to = int(it.row()) / G.M;
      if (v.empty() || v.back() != to) v.push_back(to);
    }
  for (auto& v : adj) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  std::vector<int> index(std::size_t(nm), -1), low(std::size_t(nm), 0), stack;
  std::vector<char> on(std::size_t(nm), 0);
  std::vector<std::vector<int>> comps;
  int counter = 0;
  struct Frame {
    int v;
    std::size_t next;
  };
  for (int root = 0; root < nm; ++root) {
    if (index[std::size_t(root)] >= 0) continue;
    std::vector<Frame> call{{root, 0}};
    index[std::size_t(root)] = low[std::size_t(root)] = counter++;
    stack.push_back(root);
    on[std::size_t(root)] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto& nb = adj[std::size_t(f.v)];
      if (f.next < nb.size()) {
        const int w = nb[f.next++];
        if (index[std::size_t(w)] < 0) {
          index[std::size_t(w)] = low[std::size_t(w)] = counter++;
          stack.push_back(w);
          on[std::size_t(w)] = 1;
          call.push_back({w, 0});
        } else if (on[std::size_t(w)]) {
          low[std::size_t(f.v)] = std::min(low[std::size_t(f.v)], index[std::size_t(w)]);
        }
        continue;
      }
      const int v = f.v;
      call.pop_back();
      if (!call.empty())
        low[std::size_t(call.back().v)] = std::min(low[std::size_t(call.back().v)], low[std::size_t(v)]);
      if (low[std::size_t(v)] == index[std::size_t(v)]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on[std::size_t(w)] = 0;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
      }
    }
  }
  return comps;
}

std::vector<int> block_rows(const std::vector<int>& modes, int M) {
  std::vector<int> rows;
  for (int m : modes)
    for (int q = 0; q < M; ++q) rows.push_back(m * M + q);
  return rows;
}

struct BlockEig {
  cplx value;
  VecC right, left;  // on the block rows
};

struct RitzPair {
  cplx value;
  VecC vec;
  double resid;
};

// Explicitly restarted Arnoldi with full reorthogonalization. Returns Ritz
// pairs with |value| >= cutoff; resid is |h_{m+1,m} y_m| / |value|.
std::vector<RitzPair> arnoldi(const Eigen::SparseMatrix<cplx>& B, double cutoff, int p) {
  const Eigen::Index n = B.rows();
  const Eigen::Index m = std::min<Eigen::Index>(n, std::max<Eigen::Index>(160, 10 * p));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N01;
  VecC v0(n);
  for (Eigen::Index i = 0; i < n; ++i) v0[i] = cplx(N01(rng), N01(rng));
  std::vector<RitzPair> ritz;
  for (int cycle = 0; cycle < 6; ++cycle) {
    MatC V(n, m + 1);
    MatC H = MatC::Zero(m + 1, m);
    V.col(0) = v0.normalized();
    Eigen::Index steps = m;
    for (Eigen::Index j = 0; j < m; ++j) {
      VecC w = B * V.col(j);
      // Two passes of classical Gram-Schmidt.
      for (int pass = 0; pass < 2; ++pass) {
        const VecC h = V.leftCols(j + 1).adjoint() * w;
        w -= V.leftCols(j + 1) * h;
        H.block(0, j, j + 1, 1) += h;
      }
      H(j + 1, j) = w.norm();
      if (std::abs(H(j + 1, j)) < 1e-14) {
        steps = j + 1;
        break;
      }
      V.col(j + 1) = w / H(j + 1, j);
    }
    Eigen::ComplexEigenSolver<MatC> es(H.topLeftCorner(steps, steps));
    const cplx beta = steps < m || steps == n ? cplx(0.0) : H(steps, steps - 1);
    ritz.clear();
    bool done = true;
    VecC restart = VecC::Zero(n);
    for (Eigen::Index i = 0; i < steps; ++i) {
      const cplx lam = es.eigenvalues()[i];
      if (std::abs(lam) < cutoff) continue;
      const VecC y = es.eigenvectors().col(i);
      const double resid = std::abs(beta * y[steps - 1]) / std::abs(lam);
      VecC x = V.leftCols(steps) * y;
      ritz.push_back({lam, x, resid});
      if (resid > 1e-10) {
        done = false;
        restart += x;
      }
    }
    if (done) break;
    // Restart from the unconverged wanted directions plus the converged ones.
    for (const auto& r : ritz) restart += 1e-3 * r.vec;
    v0 = restart;
  }
  return ritz;
}

// Leading eigen-data of a large block: right pairs from B, left pairs from B^H.
std::vector<BlockEig> iterative_eigs(const Eigen::SparseMatrix<cplx>& B, double cutoff, int p) {
  const auto right = arnoldi(B, cutoff, p);
  const Eigen::SparseMatrix<cplx> Bh = B.adjoint();
  const auto left = arnoldi(Bh, cutoff, p);
  std::vector<BlockEig> out;
  for (const auto& r : right) {
    if (r.resid > 1e-8) continue;
    const RitzPair* best = nullptr;
    for (const auto& l : left)
      if (!best || std::abs(l.value - std::conj(r.value)) < std::abs(best->value - std::conj(r.value))) best = &l;
    if (!best || std::abs(best->value - std::conj(r.value)) > 1e-8 * std::abs(r.value)) continue;
    out.push_back({r.value, r.vec, best->vec.conjugate()});
  }
  return out;
}

std::vector<BlockEig> dense_eigs(const MatC& B, double cutoff) {
  Eigen::ComplexEigenSolver<MatC> es(B);
  const MatC Vinv = es.eigenvectors().partialPivLu().inverse();
  std::vector<BlockEig> out;
  for (Eigen::Index j = 0; j < B.rows(); ++j) {
    if (std::abs(es.eigenvalues()[j]) < cutoff) continue;
    out.push_back({es.eigenvalues()[j], es.eigenvectors().col(j), Vinv.row(j).transpose()});
  }
  return out;
}

}  // namespace

std::vector<EigenPair> galerkin_eigs(const GalerkinMatrix& G, double cutoff, const GalerkinOptions& opt) {
  const auto comps_sinks_first = mode_components(G);
  // Topological order: sources first.
  std::vector<std::vector<int>> comps(comps_sinks_first.rbegin(), comps_sinks_first.rend());
  const int M = G.M;
  const Eigen::Index dim = G.L0.rows();
  std::vector<int> comp_of(G.modes.size(), -1);
  for (std::size_t ci = 0; ci < comps.size(); ++ci)
    for (int m : comps[ci]) comp_of[std::size_t(m)] = int(ci);

  const Eigen::SparseMatrix<cplx, Eigen::RowMajor> Lrow = G.L0;
  auto submatrix = [&](const std::vector<int>& rows, const std::vector<int>& cols) {
    std::map<int, int> cidx;
    for (std::size_t j = 0; j < cols.size(); ++j) cidx[cols[j]] = int(j);
    Eigen::SparseMatrix<cplx> S(Eigen::Index(rows.size()), Eigen::Index(cols.size()));
    std::vector<Eigen::Triplet<cplx>> t;
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (Eigen::SparseMatrix<cplx, Eigen::RowMajor>::InnerIterator it(Lrow, rows[i]); it; ++it) {
        auto f = cidx.find(int(it.col()));
        if (f != cidx.end()) t.emplace_back(int(i), f->second, it.value());
      }
    S.setFromTriplets(t.begin(), t.end());
    return S;
  };

  // Diagonal blocks with a nonzero entry carry the spectrum.
  std::vector<std::pair<std::size_t, BlockEig>> found;
  std::vector<std::vector<int>> rows_of(comps.size());
  std::vector<Eigen::SparseMatrix<cplx>> diag(comps.size());
  for (std::size_t ci = 0; ci < comps.size(); ++ci) {
    rows_of[ci] = block_rows(comps[ci], M);
    diag[ci] = submatrix(rows_of[ci], rows_of[ci]);
  }
  std::mutex mu;
  parallel_for(comps.size(), [&](std::size_t ci) {
    if (diag[ci].nonZeros() == 0) return;
    std::vector<BlockEig> be;
    if (diag[ci].rows() <= opt.dense_cap)
      be = dense_eigs(MatC(diag[ci]), cutoff);
    else
      be = iterative_eigs(diag[ci], cutoff, opt.n_iter_eigs);
    std::lock_guard<std::mutex> lock(mu);
    for (auto& b : be) found.push_back({ci, std::move(b)});
  });
  std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first < y.first;
    if (std::abs(x.second.value) != std::abs(y.second.value))
      return std::abs(x.second.value) > std::abs(y.second.value);
    return x.second.value.imag() > y.second.value.imag();
  });

  std::vector<EigenPair> out;
  for (const auto& [cs, be] : found) {
    const cplx lam = be.value;
    VecC r = VecC::Zero(dim), l = VecC::Zero(dim);
    for (std::size_t i = 0; i < rows_of[cs].size(); ++i) {
      r[rows_of[cs][i]] = be.right[Eigen::Index(i)];
      l[rows_of[cs][i]] = be.left[Eigen::Index(i)];
    }
    // Right vector downstream: (lam - B_tt) r_t = (L r)_t over earlier blocks.
    for (std::size_t t = cs + 1; t < comps.size(); ++t) {
      VecC rhs(Eigen::Index(rows_of[t].size()));
      bool any = false;
      for (std::size_t i = 0; i < rows_of[t].size(); ++i) {
        cplx acc = 0.0;
        for (Eigen::SparseMatrix<cplx, Eigen::RowMajor>::InnerIterator it(Lrow, rows_of[t][i]); it; ++it)
          if (comp_of[std::size_t(it.col()) / std::size_t(M)] < int(t)) acc += it.value() * r[it.col()];
        rhs[Eigen::Index(i)] = acc;
        any = any || acc != cplx(0.0);
      }
      if (!any) continue;
      const MatC S = lam * MatC::Identity(rhs.size(), rhs.size()) - MatC(diag[t]);
      const VecC x = S.partialPivLu().solve(rhs);
      for (std::size_t i = 0; i < rows_of[t].size(); ++i) r[rows_of[t][i]] = x[Eigen::Index(i)];
    }
    // Left vector upstream: l_t (lam - B_tt) = (l L)_t over later blocks.
    for (std::size_t t = cs; t-- > 0;) {
      VecC rhs = VecC::Zero(Eigen::Index(rows_of[t].size()));
      bool any = false;
      for (std::size_t j = 0; j < rows_of[t].size(); ++j) {
        const int col = rows_of[t][j];
        cplx acc = 0.0;
        for (Eigen::SparseMatrix<cplx>::InnerIterator it(G.L0, col); it; ++it)
          if (comp_of[std::size_t(it.row()) / std::size_t(M)] > int(t)) acc += l[it.row()] * it.value();
        rhs[Eigen::Index(j)] = acc;
        any = any || acc != cplx(0.0);
      }
      if (!any) continue;
      const MatC S = lam * MatC::Identity(rhs.size(), rhs.size()) - MatC(diag[t]);
      const VecC x = S.transpose().partialPivLu().solve(rhs);
      for (std::size_t j = 0; j < rows_of[t].size(); ++j) l[rows_of[t][j]] = x[Eigen::Index(j)];
    }
    Eigen::Index imax = 0;
    r.cwiseAbs().maxCoeff(&imax);
    r *= std::abs(r[imax]) / r[imax] / std::abs(r[imax]);
    const cplx lr = l.transpose() * r;
    l /= lr;
    out.push_back({lam, std::move(r), std::move(l)});
  }
  std::sort(out.begin(), out.end(), [](const EigenPair& x, const EigenPair& y) {
    if (std::abs(x.value) != std::abs(y.value)) return std::abs(x.value) > std::abs(y.value);
    return x.value.imag() > y.value.imag();
  });
  return out;
}

std::vector<ObstructionFunctional> obstruction_functionals(const GalerkinMatrix& G,
                                                           const std::vector<EigenPair>& eig,
                                                           double rank_tol) {
  const int hr = G.inv_h_radius, hside = 2 * hr + 1;
  std::vector<ObstructionFunctional> out;
  std::vector<VecC> basis;  // orthonormal span of accepted weight vectors
  for (const auto& p : eig) {
    // Lifted g / h has Chebyshev content only in T_0, with mode-j coefficient sum_k g_k u_{j-k}.
    VecC w = VecC::Zero(Eigen::Index(G.modes.size()));
    for (std::size_t k = 0; k < G.modes.size(); ++k) {
      cplx acc = 0.0;
      for (std::size_t j = 0; j < G.modes.size(); ++j) {
        const int d1 = G.modes[j].first - G.modes[k].first, d2 = G.modes[j].second - G.modes[k].second;
        if (std::abs(d1) > hr || std::abs(d2) > hr) continue;
        acc += p.left[Eigen::Index(j) * G.M] * G.inv_h[std::size_t((d1 + hr) * hside + (d2 + hr))];
      }
      w[Eigen::Index(k)] = acc;
    }
    const double nw = w.norm();
    if (nw < rank_tol) continue;
    VecC res = w / nw;
    for (const auto& q : basis) res -= q * q.dot(res);
    if (res.norm() < rank_tol) continue;
    basis.push_back(res.normalized());
    ObstructionFunctional f;
    f.rho = p.value;
    for (std::size_t k = 0; k < G.modes.size(); ++k)
      if (w[Eigen::Index(k)] != cplx(0.0)) f.weights.push_back({G.modes[k], w[Eigen::Index(k)]});
    out.push_back(std::move(f));
  }
  return out;
}

double off_zero_energy(const GalerkinMatrix& G, const EigenPair& p) {
  double total = 0.0, off = 0.0;
  for (std::size_t k = 0; k < G.modes.size(); ++k)
    for (int q = 0; q < G.M; ++q) {
      const double e = std::norm(p.right[Eigen::Index(k) * G.M + q]);
      total += e;
      if (G.modes[k] != Mode{0, 0}) off += e;
    }
  return total > 0.0 ? off / total : 0.0;
}

SpectralResult galerkin_spectrum(const ExtMapSpec& e, const VectorField& vf, double h_top,
                                 const GalerkinOptions& opt, double cutoff, double rel_stable) {
  const auto G1 = galerkin_matrix(e, vf, opt.K, opt.M, opt);
  const auto G2 = galerkin_matrix(e, vf, opt.K + 8, opt.M + 8, opt);
  const auto e1 = galerkin_eigs(G1, cutoff, opt);
  const auto e2 = galerkin_eigs(G2, cutoff, opt);
  SpectralResult res;
  res.method = "galerkin";
  res.cutoff = cutoff;
  std::vector<EigenPair> kept;
  for (const auto& p : e1) {
    double best = std::numeric_limits<double>::infinity();
    const EigenPair* match = nullptr;
    for (const auto& q : e2)
      if (std::abs(p.value - q.value) < best) {
        best = std::abs(p.value - q.value);
        match = &q;
      }
    if (!match || best > rel_stable * std::abs(p.value)) continue;
    res.resonances.push_back({match->value, std::log(std::abs(match->value)) / h_top, best});
    kept.push_back(*match);
  }
  res.obstructions = obstruction_functionals(G2, kept);
  return res;
}

}  // namespace renorm
