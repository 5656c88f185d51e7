#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lwc/branching.hpp"
#include "lwc/error.hpp"
#include "lwc/generators.hpp"
#include "lwc/graph.hpp"
#include "lwc/parallel.hpp"
#include "lwc/random.hpp"
#include "lwc/stats.hpp"

namespace lwc {

inline constexpr std::size_t kIsingEnumerationCap = 22;

struct IsingParams {
  double beta = 0.0;
  double field = 0.0;                ///< uniform B
  std::vector<double> local_fields;  ///< per-vertex B_u; overrides `field` when non-empty

  double field_at(Vertex u) const { return local_fields.empty() ? field : local_fields[u]; }
  void validate(std::size_t n) const {
    require(beta >= 0.0 && std::isfinite(beta), "ising: beta must be finite and >= 0");
    require(std::isfinite(field), "ising: field must be finite");
    require(local_fields.empty() || local_fields.size() == n, "ising: local field vector size mismatch");
    for (double b : local_fields) require(std::isfinite(b), "ising: local fields must be finite");
  }
};

struct GibbsSummary {
  double logZ = 0.0;
  double phi = 0.0;
  std::vector<double> magnetization;
  std::vector<std::pair<Vertex, Vertex>> pairs;
  std::vector<double> pair_correlations;
  bool plus_boundary = false;
};

/// E(beta, h) = atanh(tanh(beta) tanh(h)), argument clamped away from +-1.
inline double ising_E(double beta, double h) {
  double t = std::tanh(beta) * std::tanh(h);
  t = std::clamp(t, -1.0 + 1e-15, 1.0 - 1e-15);
  return std::atanh(t);
}

namespace detail {

/// Gray-code walk over the free spins. visit(spins, energy) sees every
/// configuration once; energy excludes the constant loop term.
template <class Visit>
void ising_walk(const Graph& g, const IsingParams& p, const std::vector<char>& clamped, Visit&& visit) {
  const std::size_t n = g.n();
  std::vector<Vertex> free;
  std::vector<int> s(n);
  for (Vertex u = 0; u < n; ++u) {
    s[u] = clamped[u] ? 1 : -1;
    if (!clamped[u]) free.push_back(u);
  }
  double e = 0.0;
  for (Vertex u = 0; u < n; ++u) {
    e += p.field_at(u) * s[u];
    for (Vertex w : g.neighbors(u))
      if (w > u) e += p.beta * s[u] * s[w];
  }
  const std::uint64_t count = std::uint64_t{1} << free.size();
  visit(s, e);
  for (std::uint64_t i = 1; i < count; ++i) {
    const Vertex u = free[static_cast<std::size_t>(std::countr_zero(i))];
    double local = p.field_at(u);
    for (Vertex w : g.neighbors(u))
      if (w != u) local += p.beta * s[w];
    e -= 2.0 * s[u] * local;
    s[u] = -s[u];
    visit(s, e);
  }
}

inline double loop_constant(const Graph& g, double beta) {
  double loops = 0.0;
  for (Vertex u = 0; u < g.n(); ++u)
    for (Vertex w : g.neighbors(u))
      if (w == u) loops += 0.5;
  return beta * loops;
}

inline std::vector<char> clamp_mask(std::size_t n, const std::vector<Vertex>& plus) {
  std::vector<char> mask(n, 0);
  for (Vertex v : plus) {
    require(v < n, "ising: boundary vertex out of range");
    require(!mask[v], "ising: repeated boundary vertex");
    mask[v] = 1;
  }
  return mask;
}

}  // namespace detail

/// Exact Gibbs averages by enumeration (two passes: maximum energy, then
/// shifted sums). `plus` clamps those vertices to +1.
inline GibbsSummary exact_gibbs(const Graph& g, const IsingParams& p, const std::vector<Vertex>& plus = {},
                                std::vector<std::pair<Vertex, Vertex>> pairs = {}) {
  const std::size_t n = g.n();
  require(n >= 1, "exact_gibbs: empty graph");
  p.validate(n);
  const auto mask = detail::clamp_mask(n, plus);
  require(n - plus.size() <= kIsingEnumerationCap,
          "exact_gibbs: " + std::to_string(n - plus.size()) + " free spins exceed the enumeration cap");
  for (auto [u, v] : pairs) require(u < n && v < n, "exact_gibbs: pair vertex out of range");

  double emax = -INFINITY;
  detail::ising_walk(g, p, mask, [&](const std::vector<int>&, double e) { emax = std::max(emax, e); });
  double z = 0.0;
  std::vector<double> m(n, 0.0), corr(pairs.size(), 0.0);
  detail::ising_walk(g, p, mask, [&](const std::vector<int>& s, double e) {
    const double w = std::exp(e - emax);
    z += w;
    for (Vertex u = 0; u < n; ++u) m[u] += w * s[u];
    for (std::size_t k = 0; k < pairs.size(); ++k) corr[k] += w * s[pairs[k].first] * s[pairs[k].second];
  });
  GibbsSummary out;
  out.logZ = emax + std::log(z) + detail::loop_constant(g, p.beta);
  out.phi = out.logZ / static_cast<double>(n);
  for (auto& x : m) x /= z;
  for (auto& x : corr) x /= z;
  out.magnetization = std::move(m);
  out.pairs = std::move(pairs);
  out.pair_correlations = std::move(corr);
  out.plus_boundary = !plus.empty();
  return out;
}

/// Exact joint law of the spins in `vs`; entry b has spin +1 at vs[i] iff
/// bit i of b is set.
inline std::vector<double> exact_marginal(const Graph& g, const IsingParams& p, const std::vector<Vertex>& vs) {
  const std::size_t n = g.n();
  p.validate(n);
  require(n <= kIsingEnumerationCap, "exact_marginal: graph exceeds the enumeration cap");
  require(vs.size() <= 20, "exact_marginal: too many marginal vertices");
  for (Vertex v : vs) require(v < n, "exact_marginal: vertex out of range");
  const std::vector<char> mask(n, 0);
  double emax = -INFINITY;
  detail::ising_walk(g, p, mask, [&](const std::vector<int>&, double e) { emax = std::max(emax, e); });
  std::vector<double> law(std::size_t{1} << vs.size(), 0.0);
  double z = 0.0;
  detail::ising_walk(g, p, mask, [&](const std::vector<int>& s, double e) {
    const double w = std::exp(e - emax);
    std::size_t b = 0;
    for (std::size_t i = 0; i < vs.size(); ++i)
      if (s[vs[i]] > 0) b |= std::size_t{1} << i;
    law[b] += w;
    z += w;
  });
  for (auto& x : law) x /= z;
  return law;
}

struct TreeFields {
  std::vector<double> subtree;  ///< h_v for the model on the subtree below v
  std::vector<double> full;     ///< effective field of v in the whole tree
  std::vector<double> magnetization;
  double root_magnetization = 0.0;
};

/// h_v = B + sum_children E(beta, h_c) bottom-up, then a top-down pass
/// adding the parent-side message for every vertex.
inline TreeFields tree_local_fields(const RootedTree& t, const IsingParams& p) {
  p.validate(t.n());
  TreeFields out;
  out.subtree.assign(t.n(), 0.0);
  out.full.assign(t.n(), 0.0);
  const auto& order = t.bfs_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    double h = p.field_at(*it);
    for (Vertex c : t.children(*it)) h += ising_E(p.beta, out.subtree[c]);
    out.subtree[*it] = h;
  }
  out.full[0] = out.subtree[0];
  for (Vertex v : order)
    for (Vertex c : t.children(v))
      out.full[c] = out.subtree[c] + ising_E(p.beta, out.full[v] - ising_E(p.beta, out.subtree[c]));
  out.magnetization.resize(t.n());
  for (Vertex v = 0; v < t.n(); ++v) out.magnetization[v] = std::tanh(out.full[v]);
  out.root_magnetization = out.magnetization[0];
  return out;
}

/// Max deviation between the exact (root, children) marginal of the tree and
/// the star model with root field B and child fields atanh<x_c>, the latter
/// computed by enumerating each child's subtree on its own.
inline double pruning_check(const RootedTree& t, const IsingParams& p) {
  require(t.n() <= 15, "pruning_check: n must be <= 15");
  p.validate(t.n());
  const auto& kids = t.children(0);
  std::vector<Vertex> vs{0};
  vs.insert(vs.end(), kids.begin(), kids.end());
  const auto exact = exact_marginal(t.as_graph().graph, p, vs);

  std::vector<double> h(kids.size());
  for (std::size_t i = 0; i < kids.size(); ++i) {
    RootedTree sub = t.subtree(kids[i]);
    IsingParams q = p;
    if (!p.local_fields.empty()) {
      // subtree() lists vertices in BFS order from kids[i]; rebuild the map.
      q.local_fields.clear();
      std::vector<Vertex> ids{kids[i]};
      for (std::size_t j = 0; j < ids.size(); ++j)
        for (Vertex c : t.children(ids[j])) ids.push_back(c);
      for (Vertex u : ids) q.local_fields.push_back(p.local_fields[u]);
    }
    double m = exact_gibbs(sub.as_graph().graph, q).magnetization[0];
    h[i] = std::atanh(std::clamp(m, -1.0 + 1e-15, 1.0 - 1e-15));
  }
  // Star model.
  const std::size_t k = vs.size();
  std::vector<double> star(std::size_t{1} << k);
  double emax = -INFINITY;
  for (std::size_t b = 0; b < star.size(); ++b) {
    const int s0 = (b & 1) ? 1 : -1;
    double e = p.field_at(0) * s0;
    for (std::size_t i = 1; i < k; ++i) {
      const int si = (b >> i & 1) ? 1 : -1;
      e += p.beta * s0 * si + h[i - 1] * si;
    }
    star[b] = e;
    emax = std::max(emax, e);
  }
  double z = 0.0;
  for (auto& e : star) z += (e = std::exp(e - emax));
  double dev = 0.0;
  for (std::size_t b = 0; b < star.size(); ++b) dev = std::max(dev, std::abs(star[b] / z - exact[b]));
  return dev;
}

struct IsingRdeOptions {
  std::size_t pool_size = 100000;
  std::size_t max_sweeps = 1000;
  std::size_t min_sweeps = 5;
  double tolerance = 1e-6;
  std::optional<double> init;  ///< starting field for every member; default B
};

struct IsingPool {
  std::vector<double> pool;
  std::size_t sweeps = 0;
  std::vector<double> drift;
  bool converged = false;
};

/// Population dynamics for Y = B + sum_{i <= K} E(beta, Y_i), K ~ p°.
template <class R>
IsingPool ising_rde_solve(const DegreePmf& p, double beta, double B, const IsingRdeOptions& opt, R& rng) {
  require(beta >= 0.0 && B >= 0.0, "ising_rde_solve: need beta >= 0 and B >= 0");
  require(p.mean() > 0.0, "ising_rde_solve: pmf mean must be positive");
  require(opt.pool_size >= 1, "ising_rde_solve: empty pool");
  const DegreePmf biased = size_biased(p);
  const std::size_t N = opt.pool_size;
  IsingPool out;
  out.pool.assign(N, opt.init.value_or(B));
  std::vector<double> next(N);
  stats::DriftMonitor monitor(opt.tolerance, opt.min_sweeps);
  for (std::size_t sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    double old_mean = 0.0, new_mean = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const std::size_t k = biased.sample(rng);
      double y = B;
      for (std::size_t c = 0; c < k; ++c) y += ising_E(beta, out.pool[rng.index(N)]);
      next[i] = y;
      old_mean += out.pool[i];
      new_mean += y;
    }
    old_mean /= static_cast<double>(N);
    new_mean /= static_cast<double>(N);
    double var = 0.0;
    for (double y : next) var += (y - new_mean) * (y - new_mean);
    const double noise = 3.0 * std::sqrt(var) / static_cast<double>(N);
    std::swap(out.pool, next);
    out.sweeps = sweep;
    const double d = std::abs(new_mean - old_mean);
    out.drift.push_back(d);
    if (monitor.update(std::complex<double>(new_mean - old_mean), noise)) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) throw NotConverged("ising_rde_solve: no convergence after " + std::to_string(opt.max_sweeps) + " sweeps");
  return out;
}

/// Kolmogorov distance between two pools after rounding to a 1e-9 grid, so
/// that pools collapsed on the same atom compare equal.
inline double pool_kolmogorov(std::vector<double> a, std::vector<double> b) {
  for (auto& x : a) x = std::round(x * 1e9) / 1e9;
  for (auto& x : b) x = std::round(x * 1e9) / 1e9;
  return stats::ks_two_sample(std::move(a), std::move(b));
}

struct MonotoneRde {
  IsingPool low, high;
  double kolmogorov = 0.0;
};

/// Runs the recursion from delta_B and from a large field; the two runs
/// bracket every other start.
template <class R>
MonotoneRde ising_rde_monotone(const DegreePmf& p, double beta, double B, IsingRdeOptions opt, R& rng,
                               double high_field = 50.0) {
  MonotoneRde out;
  // collapsed pools must agree well below the 1e-9 comparison grid
  opt.tolerance = std::min(opt.tolerance, 1e-12);
  opt.init = B;
  Rng r1 = rng.split(1), r2 = rng.split(2);
  out.low = ising_rde_solve(p, beta, B, opt, r1);
  opt.init = B + high_field;
  out.high = ising_rde_solve(p, beta, B, opt, r2);
  out.kolmogorov = pool_kolmogorov(out.low.pool, out.high.pool);
  return out;
}

/// phi_inf = (mu/2) log cosh beta - (mu/2) E log(1 + t tanh Y1 tanh Y2)
///         + E log(e^B prod(1 + t tanh Y_i) + e^-B prod(1 - t tanh Y_i)),
/// t = tanh beta, D ~ p; each sample combines all three terms.
template <class R>
stats::MeanSe free_energy_limit(const DegreePmf& p, double beta, double B, const IsingPool& pool,
                                std::size_t samples, R& rng) {
  require(pool.converged, "free_energy_limit: pool has not converged");
  require(!pool.pool.empty() && samples >= 2, "free_energy_limit: need a pool and >= 2 samples");
  const double mu = p.mean();
  const double t = std::tanh(beta);
  const std::size_t N = pool.pool.size();
  auto draw = [&] { return std::tanh(pool.pool[rng.index(N)]); };
  std::vector<double> vals(samples);
  const double first = 0.5 * mu * std::log(std::cosh(beta));
  for (auto& v : vals) {
    const double a = draw(), b = draw();
    const double edge = 0.5 * mu * std::log1p(t * a * b);
    const std::size_t d = p.sample(rng);
    double lp = B, lm = -B;
    for (std::size_t i = 0; i < d; ++i) {
      const double y = draw();
      lp += std::log1p(t * y);
      lm += std::log1p(-t * y);
    }
    const double hi = std::max(lp, lm);
    const double site = hi + std::log1p(std::exp(-std::abs(lp - lm)));
    v = first - edge + site;
  }
  return stats::mean_se(vals);
}

struct GriffithsReport {
  std::size_t checks = 0;
  std::vector<std::string> violations;
};

/// Nonnegativity and monotonicity of <x_u> and <x_u x_v> along the beta grid
/// (B fixed) and the B grid (beta fixed), by exact enumeration.
inline GriffithsReport griffiths_check(const Graph& g, const std::vector<double>& beta_grid,
                                       const std::vector<double>& B_grid, double tol = 1e-10) {
  require(g.n() <= 15, "griffiths_check: n must be <= 15");
  require(!beta_grid.empty() && !B_grid.empty(), "griffiths_check: empty grid");
  for (double b : B_grid) require(b >= 0.0, "griffiths_check: fields must be >= 0");
  require(std::is_sorted(beta_grid.begin(), beta_grid.end()) && std::is_sorted(B_grid.begin(), B_grid.end()),
          "griffiths_check: grids must be ascending");
  std::vector<std::pair<Vertex, Vertex>> pairs;
  for (Vertex u = 0; u < g.n(); ++u)
    for (Vertex v = u + 1; v < g.n(); ++v) pairs.emplace_back(u, v);
  // table[i][j] = values (magnetizations then correlations) at beta_i, B_j
  std::vector<std::vector<std::vector<double>>> table(beta_grid.size(), std::vector<std::vector<double>>(B_grid.size()));
  for (std::size_t i = 0; i < beta_grid.size(); ++i)
    for (std::size_t j = 0; j < B_grid.size(); ++j) {
      IsingParams p{beta_grid[i], B_grid[j], {}};
      auto s = exact_gibbs(g, p, {}, pairs);
      auto& row = table[i][j];
      row = s.magnetization;
      row.insert(row.end(), s.pair_correlations.begin(), s.pair_correlations.end());
    }
  GriffithsReport rep;
  auto label = [&](std::size_t k) {
    if (k < g.n()) return "<x_" + std::to_string(k) + ">";
    auto [u, v] = pairs[k - g.n()];
    return "<x_" + std::to_string(u) + " x_" + std::to_string(v) + ">";
  };
  auto where = [&](std::size_t i, std::size_t j) {
    return " at beta=" + std::to_string(beta_grid[i]) + ", B=" + std::to_string(B_grid[j]);
  };
  for (std::size_t i = 0; i < beta_grid.size(); ++i)
    for (std::size_t j = 0; j < B_grid.size(); ++j)
      for (std::size_t k = 0; k < table[i][j].size(); ++k) {
        const double x = table[i][j][k];
        ++rep.checks;
        if (x < -tol) rep.violations.push_back(label(k) + " negative" + where(i, j));
        if (i > 0) {
          ++rep.checks;
          if (x < table[i - 1][j][k] - tol) rep.violations.push_back(label(k) + " decreases in beta" + where(i, j));
        }
        if (j > 0) {
          ++rep.checks;
          if (x < table[i][j - 1][k] - tol) rep.violations.push_back(label(k) + " decreases in B" + where(i, j));
        }
      }
  return rep;
}

}  // namespace lwc
