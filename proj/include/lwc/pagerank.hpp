#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "lwc/branching.hpp"
#include "lwc/error.hpp"
#include "lwc/generators.hpp"
#include "lwc/graph.hpp"
#include "lwc/random.hpp"

namespace lwc {

struct PageRankScores {
  double damping = 0.0;
  std::vector<double> raw;         ///< r_v
  std::vector<double> normalized;  ///< n r_v
  double residual = 0.0;           ///< max |R - T(R)| on the normalized scale
  std::size_t iterations = 0;
};

namespace detail {

inline void check_damping(double c) { require(c > 0.0 && c < 1.0, "pagerank: damping c must lie in (0, 1)"); }

// One application of r -> (1-c)/n + c sum_{u -> v} r_u / d+(u), normalized scale.
inline void pagerank_step(const DiGraph& g, double c, const std::vector<double>& r, std::vector<double>& out) {
  for (Vertex v = 0; v < g.n(); ++v) {
    double s = 0.0;
    for (Vertex u : g.in(v)) s += r[u] / static_cast<double>(g.out(u).size());
    out[v] = (1.0 - c) + c * s;
  }
}

}  // namespace detail

/// Fixed-point iteration of the PageRank equations as written: dangling
/// vertices send nothing anywhere.
inline PageRankScores pagerank_linear(const DiGraph& g, double c, double tol = 1e-12, std::size_t max_iter = 100000) {
  detail::check_damping(c);
  const std::size_t n = g.n();
  require(n >= 1, "pagerank_linear: empty graph");
  std::vector<double> r(n, 1.0 - c), next(n);
  PageRankScores out;
  out.damping = c;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    detail::pagerank_step(g, c, r, next);
    double diff = 0.0;
    for (Vertex v = 0; v < n; ++v) diff = std::max(diff, std::abs(next[v] - r[v]));
    std::swap(r, next);
    out.iterations = it;
    // The map contracts by c in sup norm, so the remaining error is at most diff c / (1 - c).
    if (diff * c / (1.0 - c) <= tol * 1e-2) break;
  }
  detail::pagerank_step(g, c, r, next);
  for (Vertex v = 0; v < n; ++v) out.residual = std::max(out.residual, std::abs(next[v] - r[v]));
  if (out.residual > tol) throw NotConverged("pagerank_linear: residual " + std::to_string(out.residual));
  out.normalized = r;
  out.raw.resize(n);
  for (Vertex v = 0; v < n; ++v) out.raw[v] = r[v] / static_cast<double>(n);
  return out;
}

/// R_v = (1-c)(1 + sum_{l >= 1} c^l P_l(v)), P_l(v) the number of directed
/// paths of length l ending at v, counted level by level. Terms beyond
/// L = ceil(log tol / log c) are dropped.
inline PageRankScores pagerank_path_counts(const DiGraph& g, double c, double tol = 1e-16) {
  detail::check_damping(c);
  require(tol > 0.0 && tol < 1.0, "pagerank_path_counts: tol must lie in (0, 1)");
  const std::size_t n = g.n();
  require(n >= 1, "pagerank_path_counts: empty graph");
  for (Vertex v = 0; v < n; ++v)
    require(g.out(v).size() <= 1, "pagerank_path_counts: vertex " + std::to_string(v) + " has out-degree > 1");
  const auto L = static_cast<std::size_t>(std::ceil(std::log(tol) / std::log(c)));
  std::vector<double> sum(n, 1.0), level(n, 1.0), next(n);
  double cl = 1.0;
  for (std::size_t l = 1; l <= L; ++l) {
    cl *= c;
    bool any = false;
    for (Vertex v = 0; v < n; ++v) {
      double s = 0.0;
      for (Vertex u : g.in(v)) s += level[u];
      next[v] = s;
      if (s > 0.0) any = true;
    }
    std::swap(level, next);
    if (!any) break;
    for (Vertex v = 0; v < n; ++v) sum[v] += cl * level[v];
  }
  PageRankScores out;
  out.damping = c;
  out.normalized.resize(n);
  out.raw.resize(n);
  for (Vertex v = 0; v < n; ++v) {
    out.normalized[v] = (1.0 - c) * sum[v];
    out.raw[v] = out.normalized[v] / static_cast<double>(n);
  }
  return out;
}

/// (1-c) sum_v c^{depth(v)}: the root score given the whole tree, i.e. the
/// expected cluster size after keeping each edge with probability c.
inline double root_pagerank_given_tree(const RootedTree& t, double c) {
  detail::check_damping(c);
  double s = 0.0;
  for (Vertex v = 0; v < t.n(); ++v) s += std::pow(c, static_cast<double>(t.depth(v)));
  return (1.0 - c) * s;
}

/// One draw of the limiting root PageRank: BP(T_lambda) with T_lambda
/// exponential at the Malthusian rate, scored by root_pagerank_given_tree.
/// The tree is walked depth first and never stored; `cap` bounds its size.
template <class R>
double limit_root_pagerank_sample(const AttachmentFn& f, double c, R& rng, std::size_t cap = 100000000,
                                  std::size_t* size = nullptr) {
  detail::check_damping(c);
  const double lambda = malthusian_rate(f).lambda;
  struct Frame {
    double left;  // remaining lifetime before the observation time
    double cpow;  // c^depth
    std::size_t kids;
  };
  std::vector<Frame> stack{{rng.exponential(lambda), 1.0, 0}};
  double total = 1.0;
  std::size_t count = 1;
  while (!stack.empty()) {
    Frame& fr = stack.back();
    const double gap = rng.exponential(f(fr.kids));
    if (gap >= fr.left) {
      stack.pop_back();
      continue;
    }
    fr.left -= gap;
    ++fr.kids;
    if (++count > cap) throw CapExceeded("limit_root_pagerank_sample: tree exceeds cap " + std::to_string(cap));
    const double cp = fr.cpow * c;
    total += cp;
    stack.push_back({fr.left, cp, 0});
  }
  if (size) *size = count;
  return (1.0 - c) * total;
}

struct ExponentTargets {
  double degree_exponent = 0.0;    ///< 2 + beta
  double pagerank_exponent = 0.0;  ///< (2 + beta) / (1 + (1 + beta) c)
  double lambda = 0.0;             ///< 2 + beta
  double lambda_c = 0.0;           ///< 1 + (1 + beta) c
};

inline ExponentTargets exponent_targets(double beta, double c) {
  require(beta > -1.0, "exponent_targets: need beta > -1");
  detail::check_damping(c);
  ExponentTargets e;
  e.lambda = 2.0 + beta;
  e.lambda_c = 1.0 + (1.0 + beta) * c;
  e.degree_exponent = 2.0 + beta;
  e.pagerank_exponent = (2.0 + beta) / (1.0 + (1.0 + beta) * c);
  return e;
}

}  // namespace lwc
