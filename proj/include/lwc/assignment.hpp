#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lwc/branching.hpp"
#include "lwc/error.hpp"
#include "lwc/parallel.hpp"
#include "lwc/random.hpp"
#include "lwc/stats.hpp"

namespace lwc {

class CostMatrix {
 public:
  explicit CostMatrix(std::size_t n = 0) : n_(n), c_(n * n, 0.0) {}
  CostMatrix(std::size_t n, std::vector<double> costs) : n_(n), c_(std::move(costs)) {
    require(c_.size() == n * n, "CostMatrix: need n*n entries");
  }
  std::size_t n() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return c_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return c_[i * n_ + j]; }
  const std::vector<double>& data() const { return c_; }

 private:
  std::size_t n_;
  std::vector<double> c_;
};

struct Matching {
  std::vector<std::size_t> perm;  ///< row i -> column perm[i]
  double total_cost = 0.0;
  std::vector<double> u, v;       ///< dual potentials: u_i + v_j <= c(i, j)
};

namespace detail {

// Lexicographically smallest perfect matching inside the tight subgraph,
// starting from the matching the solver returned.
inline void lex_smallest(const CostMatrix& m, Matching& s, double eps) {
  const std::size_t n = m.n();
  std::vector<std::vector<std::size_t>> tight(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (m(i, j) - s.u[i] - s.v[j] <= eps) tight[i].push_back(j);
  auto& row = s.perm;
  std::vector<std::size_t> col(n);
  for (std::size_t i = 0; i < n; ++i) col[row[i]] = i;
  std::vector<char> seen(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t target = row[i];
    for (std::size_t j : tight[i]) {
      if (j >= target) break;
      if (col[j] < i) continue;
      // Re-seat row col[j] using rows > i only, ending on column `target`.
      std::fill(seen.begin(), seen.end(), 0);
      seen[j] = 1;
      std::vector<std::pair<std::size_t, std::size_t>> path;  // (row, new column)
      auto dfs = [&](auto&& self, std::size_t r) -> bool {
        for (std::size_t jj : tight[r]) {
          if (seen[jj] || col[jj] < i) continue;
          seen[jj] = 1;
          if (jj == target || self(self, col[jj])) {
            path.emplace_back(r, jj);
            return true;
          }
        }
        return false;
      };
      if (dfs(dfs, col[j])) {
        for (auto [r, jj] : path) {
          row[r] = jj;
          col[jj] = r;
        }
        row[i] = j;
        col[j] = i;
        break;
      }
    }
  }
}

}  // namespace detail

/// Minimum-cost perfect assignment by shortest augmenting paths with dual
/// potentials, O(n^3). Among optimal permutations the lexicographically
/// smallest is returned.
inline Matching optimal_assignment(const CostMatrix& m) {
  const std::size_t n = m.n();
  require(n >= 1, "optimal_assignment: n must be >= 1");
  double scale = 0.0;
  for (double x : m.data()) {
    require(std::isfinite(x), "optimal_assignment: non-finite cost");
    scale = std::max(scale, std::abs(x));
  }
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based arrays; column 0 is the virtual start.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j)
        if (!used[j]) {
          const double cur = m(i0 - 1, j - 1) - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
          if (minv[j] < delta) {
            delta = minv[j];
            j1 = j;
          }
        }
      for (std::size_t j = 0; j <= n; ++j)
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  Matching s;
  s.perm.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) s.perm[p[j] - 1] = j - 1;
  s.u.assign(u.begin() + 1, u.end());
  s.v.assign(v.begin() + 1, v.end());
  detail::lex_smallest(m, s, 1e-9 * (1.0 + scale));
  for (std::size_t i = 0; i < n; ++i) s.total_cost += m(i, s.perm[i]);
  return s;
}

/// Complementary-slackness residual of the returned duals: the larger of the
/// worst dual infeasibility and the worst reduced cost on matched pairs.
inline double dual_residual(const CostMatrix& m, const Matching& s) {
  double r = 0.0;
  for (std::size_t i = 0; i < m.n(); ++i) {
    for (std::size_t j = 0; j < m.n(); ++j) r = std::max(r, s.u[i] + s.v[j] - m(i, j));
    r = std::max(r, std::abs(m(i, s.perm[i]) - s.u[i] - s.v[s.perm[i]]));
  }
  return r;
}

/// Mean of A_n / n over replicas. Costs are iid exponential with mean n, or
/// mean 1 when unit_mean is set (A_n is then rescaled by n so both report the
/// same quantity).
template <class R>
stats::MeanSe random_assignment_experiment(std::size_t n, std::size_t replicas, R& rng, bool unit_mean = false) {
  require(n >= 1 && replicas >= 1, "random_assignment_experiment: need n >= 1 and replicas >= 1");
  std::vector<double> out(replicas);
  const double mean = unit_mean ? 1.0 : static_cast<double>(n);
  parallel_for(replicas, [&](std::size_t r) {
    Rng local = rng.split(r);
    CostMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = local.exponential(1.0 / mean);
    double a = optimal_assignment(m).total_cost;
    if (unit_mean) a *= static_cast<double>(n);
    out[r] = a / static_cast<double>(n);
  });
  return stats::mean_se(out);
}

inline double logistic_cdf(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// (e^{x/2} + e^{-x/2})^{-2}, written in terms of e^{-|x|}.
inline double logistic_density(double x) {
  const double e = std::exp(-std::abs(x));
  return e / ((1.0 + e) * (1.0 + e));
}

struct LogisticRdeOptions {
  std::size_t pool_size = 100000;
  std::size_t max_sweeps = 500;
  std::size_t min_sweeps = 20;
  std::size_t points = 30;       ///< Poisson points kept per update
  double tolerance = 1e-4;
  double temper_quantile = 1e-6; ///< values beyond these quantiles are clamped
  double refresh = 0.5;          ///< share of members redrawn per sweep; damps the period-2 mode
};

struct LogisticPool {
  std::vector<double> pool;
  std::size_t sweeps = 0;
  std::vector<double> drift;
  bool converged = false;
  double max_margin = 0.0;  ///< smallest gap xi_M - max pool value seen (diagnostic)
};

/// Population dynamics for X = min_{i <= M} (xi_i - X_i), xi a rate-one
/// Poisson process. Starts from delta_0. Throws if any update attains its
/// minimum at the last kept point.
template <class R>
LogisticPool logistic_rde_solve(const LogisticRdeOptions& opt, R& rng) {
  require(opt.pool_size >= 10 && opt.points >= 2, "logistic_rde_solve: pool or cutoff too small");
  const std::size_t N = opt.pool_size, M = opt.points;
  LogisticPool out;
  out.pool.assign(N, 0.0);
  out.max_margin = INFINITY;
  std::vector<double> next(N);
  auto moments = [](const std::vector<double>& xs) {
    double m = 0.0, s = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    for (double x : xs) s += (x - m) * (x - m);
    return std::make_pair(m, std::sqrt(s / static_cast<double>(xs.size())));
  };
  auto prev = moments(out.pool);
  stats::DriftMonitor monitor(opt.tolerance, opt.min_sweeps);
  for (std::size_t sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    const double top = *std::max_element(out.pool.begin(), out.pool.end());
    for (std::size_t i = 0; i < N; ++i) {
      if (opt.refresh < 1.0 && !rng.bernoulli(opt.refresh)) {
        next[i] = out.pool[i];
        continue;
      }
      double xi = 0.0, best = INFINITY;
      std::size_t arg = 0;
      for (std::size_t k = 0; k < M; ++k) {
        xi += rng.exponential(1.0);
        const double cand = xi - out.pool[rng.index(N)];
        if (cand < best) {
          best = cand;
          arg = k;
        }
      }
      out.max_margin = std::min(out.max_margin, xi - top);
      if (arg == M - 1)
        throw NotConverged("logistic_rde_solve: minimum attained at the cutoff point; raise --points");
      next[i] = best;
    }
    if (opt.temper_quantile > 0.0) {
      const double lo = stats::quantile(next, opt.temper_quantile);
      const double hi = stats::quantile(next, 1.0 - opt.temper_quantile);
      for (auto& x : next) x = std::clamp(x, lo, hi);
    }
    std::swap(out.pool, next);
    out.sweeps = sweep;
    const auto cur = moments(out.pool);
    const std::complex<double> delta(cur.first - prev.first, cur.second - prev.second);
    const double d = std::max(std::abs(delta.real()), std::abs(delta.imag()));
    out.drift.push_back(d);
    prev = cur;
    const double noise = 3.0 * cur.second / std::sqrt(static_cast<double>(N));
    if (monitor.update(delta, noise)) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) throw NotConverged("logistic_rde_solve: no convergence");
  return out;
}

/// int_0^inf x P(X1 + X2 > x) dx from pool pairs, via the identity
/// int_0^inf x P(S > x) dx = E[(S^+)^2] / 2.
template <class R>
stats::MeanSe zeta2_integral(const std::vector<double>& pool, std::size_t pairs, R& rng) {
  require(!pool.empty() && pairs >= 2, "zeta2_integral: need a pool and >= 2 pairs");
  std::vector<double> vals(pairs);
  for (auto& v : vals) {
    const double s = pool[rng.index(pool.size())] + pool[rng.index(pool.size())];
    v = s > 0.0 ? 0.5 * s * s : 0.0;
  }
  return stats::mean_se(vals);
}

template <class R>
stats::MeanSe zeta2_integral(const LogisticPool& pool, std::size_t pairs, R& rng) {
  require(pool.converged, "zeta2_integral: pool has not converged");
  return zeta2_integral(pool.pool, pairs, rng);
}

/// Same integral for two independent logistics by nested quadrature:
/// P(X1 + X2 > x) = int f(y) (1 - F(x - y)) dy.
inline double zeta2_integral_analytic() {
  using boost::math::quadrature::gauss_kronrod;
  auto tail = [](double x) {
    auto inner = [x](double y) { return logistic_density(y) * logistic_cdf(y - x); };
    return gauss_kronrod<double, 61>::integrate(inner, -INFINITY, INFINITY, 15, 1e-13);
  };
  auto outer = [&](double x) { return x * tail(x); };
  return gauss_kronrod<double, 61>::integrate(outer, 0.0, INFINITY, 15, 1e-12);
}

struct GreedyMatching {
  std::vector<Vertex> mate;  ///< kNoVertex when unmatched
  double root_weight = INFINITY;
};

/// Top-down greedy: every vertex still unmatched takes its lightest unmatched
/// child. Children are generated in increasing weight order.
inline GreedyMatching pwit_greedy_matching(const WeightedTree& w) {
  require(w.tree.height() >= 1, "pwit_greedy_matching: need depth >= 1");
  const auto& t = w.tree;
  GreedyMatching g;
  g.mate.assign(t.n(), kNoVertex);
  for (Vertex v : t.bfs_order()) {
    if (g.mate[v] != kNoVertex) continue;
    Vertex best = kNoVertex;
    for (Vertex c : t.children(v))
      if (g.mate[c] == kNoVertex && (best == kNoVertex || w.weight[c] < w.weight[best])) best = c;
    if (best != kNoVertex) {
      g.mate[v] = best;
      g.mate[best] = v;
    }
  }
  if (g.mate[0] != kNoVertex) g.root_weight = w.weight[g.mate[0]];
  return g;
}

inline constexpr double kZeta2 = std::numbers::pi * std::numbers::pi / 6.0;

}  // namespace lwc
