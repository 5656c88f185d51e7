#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <lapacke.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lwc/branching.hpp"
#include "lwc/error.hpp"
#include "lwc/generators.hpp"
#include "lwc/graph.hpp"
#include "lwc/measure.hpp"
#include "lwc/parallel.hpp"
#include "lwc/random.hpp"
#include "lwc/stats.hpp"

namespace lwc {

using cplx = std::complex<double>;

inline constexpr std::size_t kDefaultEigenCap = 10000;

/// Adjacency spectrum, ascending. Parallel edges add their multiplicity;
/// each self-loop adds 1 to the diagonal.
inline std::vector<double> eigenvalues_symmetric(const Graph& g, std::size_t cap = kDefaultEigenCap) {
  const std::size_t n = g.n();
  if (n > cap)
    throw CapExceeded("eigenvalues_symmetric: n = " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
  if (n == 0) return {};
  std::vector<double> a(n * n, 0.0);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v : g.neighbors(u)) a[v * n + u] += (u == v) ? 0.5 : 1.0;
  std::vector<double> w(n);
  lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', static_cast<lapack_int>(n), a.data(),
                                   static_cast<lapack_int>(n), w.data());
  if (info != 0) throw NotConverged("eigenvalues_symmetric: LAPACK dsyevd failed, info = " + std::to_string(info));
  std::sort(w.begin(), w.end());
  return w;
}

/// Binned empirical spectral distribution, total 1.
inline IntMeasure esd(const std::vector<double>& eigs, const RealBinning& bins) {
  require(!eigs.empty(), "esd: empty spectrum");
  IntMeasure m;
  for (double x : eigs) m.add(bins.bin(x));
  return m.normalized();
}

inline IntMeasure esd(const Graph& g, const RealBinning& bins) { return esd(eigenvalues_symmetric(g), bins); }

/// s(z) = (1/n) sum 1/(lambda_i - z).
inline cplx stieltjes(const std::vector<double>& eigs, cplx z) {
  require(z.imag() > 0.0, "stieltjes: need Im z > 0");
  require(!eigs.empty(), "stieltjes: empty spectrum");
  cplx s = 0.0;
  for (double x : eigs) s += 1.0 / (x - z);
  return s / static_cast<double>(eigs.size());
}

/// Stieltjes transform of a binned measure, atoms placed at bin centres.
inline cplx stieltjes(const IntMeasure& m, const RealBinning& bins, cplx z) {
  require(z.imag() > 0.0, "stieltjes: need Im z > 0");
  const double t = m.total();
  require(t > 0.0, "stieltjes: zero-total measure");
  cplx s = 0.0;
  for (const auto& [b, w] : m.atoms()) s += w / (bins.center(b) - z);
  return s / t;
}

/// Density estimate (1/pi) Im s(x + iy); biased by O(y).
inline double stieltjes_invert(cplx s_at_x_plus_iy) { return s_at_x_plus_iy.imag() / std::numbers::pi; }

/// Root-of-subtree resolvents R_v = [(A_v - z)^{-1}]_{vv}, A_v the adjacency
/// of the subtree below v: R_v = -1 / (z + sum_{children c} R_c).
inline std::vector<cplx> resolvent_tree(const RootedTree& t, cplx z) {
  require(z.imag() > 0.0, "resolvent_tree: need Im z > 0");
  std::vector<cplx> r(t.n());
  const auto& order = t.bfs_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    cplx s = z;
    for (Vertex c : t.children(*it)) s += r[c];
    r[*it] = -1.0 / s;
  }
  return r;
}

/// Full diagonal [(A - z)^{-1}]_{vv} of the whole tree, by adding the
/// message coming from each vertex's parent side.
inline std::vector<cplx> resolvent_diagonal(const RootedTree& t, cplx z) {
  const auto down = resolvent_tree(t, z);
  std::vector<cplx> up(t.n(), 0.0);  // resolvent of the parent side seen from v
  std::vector<cplx> diag(t.n());
  for (Vertex v : t.bfs_order()) {
    cplx s = z + up[v];
    for (Vertex c : t.children(v)) s += down[c];
    diag[v] = -1.0 / s;
    for (Vertex c : t.children(v)) up[c] = -1.0 / (s - down[c]);
  }
  return diag;
}

/// Closed-form deterministic RDE root for the k-regular limit tree:
/// Y = -1 / (z + (k - 1) Y), branch with Im Y > 0.
inline cplx regular_tree_Y(std::size_t k, cplx z) {
  require(k >= 2, "regular_tree_Y: need k >= 2");
  const double d = static_cast<double>(k - 1);
  cplx root = std::sqrt(z * z - 4.0 * d);
  cplx a = (-z + root) / (2.0 * d), b = (-z - root) / (2.0 * d);
  return a.imag() > 0.0 ? a : b;
}

/// Stieltjes transform of the Kesten-McKay law: -1 / (z + k Y(z)).
inline cplx kesten_mckay_stieltjes(std::size_t k, cplx z) {
  return -1.0 / (z + static_cast<double>(k) * regular_tree_Y(k, z));
}

/// Semicircle of radius 2: s(z) = (-z + sqrt(z^2 - 4)) / 2, branch Im s > 0.
inline cplx semicircle_stieltjes(cplx z) {
  cplx root = std::sqrt(z * z - 4.0);
  cplx a = (-z + root) / 2.0, b = (-z - root) / 2.0;
  return a.imag() > 0.0 ? a : b;
}

/// (k / 2 pi) sqrt(4(k-1) - x^2) / (k^2 - x^2) on |x| <= 2 sqrt(k-1).
inline double kesten_mckay_density(std::size_t k, double x) {
  require(k >= 3, "kesten_mckay_density: need k >= 3");
  const double kk = static_cast<double>(k);
  const double r2 = 4.0 * (kk - 1.0);
  if (x * x >= r2) return 0.0;
  return kk / (2.0 * std::numbers::pi) * std::sqrt(r2 - x * x) / (kk * kk - x * x);
}

/// Kesten-McKay cdf by Gauss-Kronrod quadrature in x = R sin(theta).
inline double kesten_mckay_cdf(std::size_t k, double x) {
  require(k >= 3, "kesten_mckay_cdf: need k >= 3");
  const double R = 2.0 * std::sqrt(static_cast<double>(k) - 1.0);
  if (x <= -R) return 0.0;
  if (x >= R) return 1.0;
  const double th = std::asin(x / R);
  auto integrand = [&](double t) { return kesten_mckay_density(k, R * std::sin(t)) * R * std::cos(t); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, -std::numbers::pi / 2, th, 10,
                                                                       1e-13);
}

/// Grid z_j = x_j + i y. Im z must be positive.
inline std::vector<cplx> spectral_grid(double x_lo, double x_hi, double step, double y) {
  require(y > 0.0 && step > 0.0 && x_hi >= x_lo, "spectral_grid: bad parameters");
  std::vector<cplx> g;
  const auto count = static_cast<std::size_t>(std::floor((x_hi - x_lo) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) g.emplace_back(x_lo + static_cast<double>(i) * step, y);
  return g;
}

struct SpectralRdeOptions {
  std::size_t pool_size = 100000;
  std::size_t max_sweeps = 2000;
  std::size_t min_sweeps = 5;
  double tolerance = 1e-4;   ///< on the estimated distance of the pool mean to its limit
  bool random_init = false;  ///< random start inside the class H instead of -1/z
};

/// Population-dynamics approximation of the law Q solving
/// Y(z) = -1 / (z + sum_{i <= D°} Y_i(z)), one pool per grid point.
struct SpectralPool {
  std::vector<cplx> grid;
  std::vector<std::vector<cplx>> pool;  ///< pool[j] holds samples at grid[j]
  std::vector<cplx> s_inf;              ///< E X(z) with D ~ p
  std::size_t sweeps = 0;
  std::vector<double> drift;            ///< max over grid of |pool-mean change| per sweep
  bool converged = false;

  /// |v| <= 1 / Im z and Im v > 0 for every sample.
  bool in_class_H() const {
    for (std::size_t j = 0; j < grid.size(); ++j)
      for (const auto& v : pool[j])
        if (!(v.imag() > 0.0) || std::abs(v) > 1.0 / grid[j].imag() * (1.0 + 1e-12)) return false;
    return true;
  }
};

/// Sweeps are synchronous: each sweep reads the previous snapshot and writes
/// a fresh pool. Drift is the change of the pool mean; see DriftMonitor.
template <class R>
SpectralPool spectral_rde_solve(const DegreePmf& p, const std::vector<cplx>& grid, const SpectralRdeOptions& opt,
                                R& rng) {
  require(!grid.empty(), "spectral_rde_solve: empty grid");
  for (auto z : grid) require(z.imag() > 0.0, "spectral_rde_solve: grid needs Im z > 0");
  require(p.mean() > 0.0, "spectral_rde_solve: pmf mean must be positive");
  require(opt.pool_size >= 1, "spectral_rde_solve: empty pool");
  const DegreePmf biased = size_biased(p);
  SpectralPool out;
  out.grid = grid;
  out.pool.resize(grid.size());
  out.s_inf.resize(grid.size());
  const std::size_t N = opt.pool_size;
  std::vector<double> drift(grid.size(), 0.0), noise(grid.size(), 0.0);
  std::vector<cplx> delta(grid.size());
  std::vector<Rng> streams;
  for (std::size_t j = 0; j < grid.size(); ++j) streams.push_back(rng.split(j));
  // init
  for (std::size_t j = 0; j < grid.size(); ++j) {
    auto& P = out.pool[j];
    P.resize(N);
    for (auto& v : P) {
      cplx w = opt.random_init ? cplx(10.0 * streams[j].uniform() - 5.0, 5.0 * streams[j].uniform()) : cplx(0.0);
      v = -1.0 / (grid[j] + w);
    }
  }
  std::vector<std::vector<cplx>> next(grid.size(), std::vector<cplx>(N));
  // One monitor per grid point; a point stays done once it has passed.
  std::vector<stats::DriftMonitor> monitors(grid.size(), stats::DriftMonitor(opt.tolerance, opt.min_sweeps));
  std::vector<char> done(grid.size(), 0);
  for (std::size_t sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    parallel_for(grid.size(), [&](std::size_t j) {
      auto& r = streams[j];
      const auto& P = out.pool[j];
      auto& Q = next[j];
      cplx old_mean = 0.0, new_mean = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        std::size_t d = biased.sample(r);
        cplx s = grid[j];
        for (std::size_t c = 0; c < d; ++c) s += P[r.index(N)];
        Q[i] = -1.0 / s;
        old_mean += P[i];
        new_mean += Q[i];
      }
      old_mean /= static_cast<double>(N);
      new_mean /= static_cast<double>(N);
      double var = 0.0;
      for (const auto& v : Q) var += std::norm(v - new_mean);
      noise[j] = 3.0 * std::sqrt(var / static_cast<double>(N) / static_cast<double>(N));
      delta[j] = new_mean - old_mean;
      drift[j] = std::abs(delta[j]);
    });
    std::swap(out.pool, next);
    out.sweeps = sweep;
    bool ok = true;
    double worst = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      worst = std::max(worst, drift[j]);
      if (monitors[j].update(delta[j], noise[j])) done[j] = 1;
      if (!done[j]) ok = false;
    }
    out.drift.push_back(worst);
    if (ok) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged)
    throw NotConverged("spectral_rde_solve: drift still " + std::to_string(out.drift.back()) + " after " +
                       std::to_string(opt.max_sweeps) + " sweeps");
  // s_inf(z) = E[-1 / (z + sum_{i <= D} Y_i)], D ~ p, fresh draws.
  parallel_for(grid.size(), [&](std::size_t j) {
    auto& r = streams[j];
    const auto& P = out.pool[j];
    cplx acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      std::size_t d = p.sample(r);
      cplx s = grid[j];
      for (std::size_t c = 0; c < d; ++c) s += P[r.index(N)];
      acc += -1.0 / s;
    }
    out.s_inf[j] = acc / static_cast<double>(N);
  });
  return out;
}

}  // namespace lwc
