#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "lwc/error.hpp"
#include "lwc/fenwick.hpp"
#include "lwc/graph.hpp"
#include "lwc/random.hpp"

namespace lwc {

/// Probability mass function on {0, 1, 2, ...} with finite support.
class DegreePmf {
 public:
  explicit DegreePmf(std::vector<double> probs) : probs_(std::move(probs)) {
    require(!probs_.empty(), "pmf must have at least one atom");
    double s = 0.0;
    for (double p : probs_) {
      require(p >= 0.0 && std::isfinite(p), "pmf entries must be finite and nonnegative");
      s += p;
    }
    require(std::abs(s - 1.0) < 1e-9, "pmf must sum to 1");
    for (auto& p : probs_) p /= s;
    while (probs_.size() > 1 && probs_.back() == 0.0) probs_.pop_back();
    cdf_.resize(probs_.size());
    std::partial_sum(probs_.begin(), probs_.end(), cdf_.begin());
    for (std::size_t k = 0; k < probs_.size(); ++k) {
      mean_ += static_cast<double>(k) * probs_[k];
      second_ += static_cast<double>(k * k) * probs_[k];
    }
  }

  static DegreePmf point(std::size_t k) {
    std::vector<double> p(k + 1, 0.0);
    p[k] = 1.0;
    return DegreePmf(std::move(p));
  }

  /// Poisson(lambda) truncated at kmax (default: far enough that the lost
  /// mass is below double precision) and renormalized.
  static DegreePmf poisson(double lambda, std::size_t kmax = 0) {
    require(lambda > 0.0, "poisson: mean must be positive");
    if (kmax == 0) kmax = static_cast<std::size_t>(lambda + 20.0 * std::sqrt(lambda) + 30.0);
    std::vector<double> p(kmax + 1);
    for (std::size_t k = 0; k <= kmax; ++k)
      p[k] = std::exp(-lambda + static_cast<double>(k) * std::log(lambda) - std::lgamma(static_cast<double>(k) + 1.0));
    double s = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& x : p) x /= s;
    return DegreePmf(std::move(p));
  }

  const std::vector<double>& probs() const { return probs_; }
  double operator[](std::size_t k) const { return k < probs_.size() ? probs_[k] : 0.0; }
  std::size_t max_degree() const { return probs_.size() - 1; }
  double mean() const { return mean_; }
  double second_moment() const { return second_; }

  template <class R>
  std::size_t sample(R& rng) const {
    double u = rng.uniform();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    std::size_t k = static_cast<std::size_t>(it - cdf_.begin());
    k = std::min(k, probs_.size() - 1);
    while (probs_[k] == 0.0 && k > 0) --k;
    return k;
  }

 private:
  std::vector<double> probs_;
  std::vector<double> cdf_;
  double mean_ = 0.0;
  double second_ = 0.0;
};

/// Attachment function f on child counts. f(k) = k + 1 + beta is the
/// linear preferential attachment case; a constant is the uniform case.
class AttachmentFn {
 public:
  enum class Kind { constant, affine, general };

  static AttachmentFn constant(double c = 1.0) {
    require(c > 0.0, "attachment constant must be positive");
    return AttachmentFn(Kind::constant, c, [c](std::size_t) { return c; });
  }

  /// f(k) = k + 1 + beta, beta > -1.
  static AttachmentFn affine(double beta) {
    require(beta > -1.0, "affine attachment needs beta > -1");
    const double a = 1.0 + beta;
    return AttachmentFn(Kind::affine, a, [a](std::size_t k) { return static_cast<double>(k) + a; });
  }

  static AttachmentFn general(std::function<double(std::size_t)> f) {
    return AttachmentFn(Kind::general, 0.0, std::move(f));
  }

  double operator()(std::size_t k) const { return f_(k); }
  Kind kind() const { return kind_; }
  /// Constant value (constant kind) or offset a = 1 + beta (affine kind).
  double offset() const { return offset_; }
  double beta() const { return offset_ - 1.0; }

 private:
  AttachmentFn(Kind k, double off, std::function<double(std::size_t)> f)
      : kind_(k), offset_(off), f_(std::move(f)) {}

  Kind kind_;
  double offset_;
  std::function<double(std::size_t)> f_;
};

/// Attribute model parameters: type pmf pi, propensity kernel kappa, degree
/// exponent gamma.
struct AttributeKernel {
  std::vector<double> pi;
  std::vector<std::vector<double>> kappa;
  double gamma = 1.0;

  std::size_t types() const { return pi.size(); }

  void validate() const {
    require(!pi.empty(), "attribute kernel needs at least one type");
    double s = 0.0;
    for (double p : pi) {
      require(p >= 0.0, "pi entries must be nonnegative");
      s += p;
    }
    require(std::abs(s - 1.0) < 1e-9, "pi must sum to 1");
    require(kappa.size() == pi.size(), "kappa must be s x s");
    for (const auto& row : kappa) {
      require(row.size() == pi.size(), "kappa must be s x s");
      for (double k : row) require(k > 0.0 && std::isfinite(k), "kappa entries must be positive");
    }
    require(gamma >= 0.0 && gamma <= 1.0, "gamma must lie in [0, 1]");
  }
};

/// Law of the co-evolving walk length Z on {0, 1, ...}: finite pmf or
/// Geometric(p) with P(Z = k) = p (1 - p)^k.
class StepPmf {
 public:
  static StepPmf finite(std::vector<double> probs) {
    StepPmf s;
    s.pmf_.emplace(std::move(probs));
    return s;
  }
  static StepPmf geometric(double p) {
    require(p > 0.0 && p <= 1.0, "geometric parameter must be in (0, 1]");
    StepPmf s;
    s.geom_p_ = p;
    return s;
  }
  static StepPmf point(std::size_t k) {
    StepPmf s;
    s.pmf_.emplace(DegreePmf::point(k));
    return s;
  }

  double mean() const { return pmf_ ? pmf_->mean() : (1.0 - geom_p_) / geom_p_; }

  template <class R>
  std::size_t sample(R& rng) const {
    if (pmf_) return pmf_->sample(rng);
    if (geom_p_ >= 1.0) return 0;
    return std::geometric_distribution<std::size_t>(geom_p_)(rng);
  }

 private:
  StepPmf() = default;
  std::optional<DegreePmf> pmf_;
  double geom_p_ = 1.0;
};

// ---------------------------------------------------------------------------

/// Erdos-Renyi G(n, lambda/n): every pair independently with prob lambda/n.
/// Pairs are visited with geometric skips, O(n + m).
template <class R>
Graph erdos_renyi(std::size_t n, double lambda, R& rng) {
  require(n >= 1, "erdos_renyi: n must be positive");
  require(lambda >= 0.0 && lambda <= static_cast<double>(n), "erdos_renyi: need 0 <= lambda <= n");
  Graph g(n);
  const double p = lambda / static_cast<double>(n);
  if (p <= 0.0 || n < 2) return g;
  if (p >= 1.0) {
    for (Vertex v = 1; v < n; ++v)
      for (Vertex w = 0; w < v; ++w) g.add_edge(v, w);
    g.finalize();
    return g;
  }
  const double log_q = std::log1p(-p);
  std::size_t v = 1;
  std::int64_t w = -1;
  while (v < n) {
    double skip = std::floor(std::log(rng.uniform_pos()) / log_q);
    w += 1 + static_cast<std::int64_t>(std::min(skip, 9e18));
    while (v < n && w >= static_cast<std::int64_t>(v)) {
      w -= static_cast<std::int64_t>(v);
      ++v;
    }
    if (v < n) g.add_edge(v, static_cast<Vertex>(w));
  }
  g.finalize();
  return g;
}

/// Configuration model on a realized degree sequence. Half-edges are paired
/// sequentially: the smallest-indexed unpaired half-edge is matched with a
/// uniformly chosen other unpaired half-edge. Loops and multi-edges are kept.
template <class R>
Graph configuration_model(const std::vector<std::size_t>& degrees, R& rng) {
  const std::size_t n = degrees.size();
  require(n >= 1, "configuration_model: empty degree sequence");
  std::size_t h = std::accumulate(degrees.begin(), degrees.end(), std::size_t{0});
  require(h % 2 == 0, "configuration_model: degree sum must be even");
  std::vector<Vertex> owner;
  owner.reserve(h);
  for (Vertex v = 0; v < n; ++v) owner.insert(owner.end(), degrees[v], v);
  // Unpaired half-edges live in free[0..live); pos[] tracks their slots.
  std::vector<std::size_t> free(h), pos(h);
  std::iota(free.begin(), free.end(), std::size_t{0});
  std::iota(pos.begin(), pos.end(), std::size_t{0});
  std::size_t live = h;
  auto remove = [&](std::size_t e) {
    std::size_t slot = pos[e];
    std::size_t last = free[live - 1];
    free[slot] = last;
    pos[last] = slot;
    --live;
  };
  std::vector<bool> paired(h, false);
  Graph g(n);
  for (std::size_t e = 0; e < h; ++e) {
    if (paired[e]) continue;
    remove(e);
    std::size_t mate = free[rng.index(live)];
    remove(mate);
    paired[e] = paired[mate] = true;
    g.add_edge(owner[e], owner[mate]);
  }
  g.finalize();
  return g;
}

/// iid degrees from a pmf; if the sum is odd the last degree is raised by one.
template <class R>
std::vector<std::size_t> sample_degrees(const DegreePmf& pmf, std::size_t n, R& rng) {
  std::vector<std::size_t> d(n);
  std::size_t sum = 0;
  for (auto& x : d) {
    x = pmf.sample(rng);
    sum += x;
  }
  if (sum % 2 == 1) ++d.back();
  return d;
}

template <class R>
Graph configuration_model(const DegreePmf& pmf, std::size_t n, R& rng) {
  require(pmf.mean() > 0.0, "configuration_model: pmf mean must be positive");
  return configuration_model(sample_degrees(pmf, n, rng), rng);
}

/// Sequential growth: vertex k joins v in [0, k) with probability
/// proportional to f(children(v)).
template <class R>
RootedTree recursive_tree(std::size_t n, const AttachmentFn& f, R& rng) {
  require(n >= 1, "recursive_tree: n must be positive");
  std::vector<Vertex> parent(n, kNoVertex);
  switch (f.kind()) {
    case AttachmentFn::Kind::constant:
      for (Vertex k = 1; k < n; ++k) parent[k] = rng.index(k);
      break;
    case AttachmentFn::Kind::affine: {
      // Total weight over m vertices is (m - 1) + a m. Pick a uniform vertex
      // with probability a m / total, else the parent of a uniform non-root
      // vertex (which is proportional to child count).
      const double a = f.offset();
      for (Vertex k = 1; k < n; ++k) {
        const double m = static_cast<double>(k);
        const double total = (m - 1.0) + a * m;
        if (rng.uniform() * total < a * m)
          parent[k] = rng.index(k);
        else
          parent[k] = parent[1 + rng.index(k - 1)];
      }
      break;
    }
    case AttachmentFn::Kind::general: {
      Fenwick w(n);
      std::vector<std::size_t> kids(n, 0);
      w.set(0, f(0));
      for (Vertex k = 1; k < n; ++k) {
        Vertex p = w.sample(rng);
        parent[k] = p;
        ++kids[p];
        w.set(p, f(kids[p]));
        w.set(k, f(0));
      }
      break;
    }
  }
  return RootedTree(std::move(parent));
}

/// Attribute-driven attachment. Each arrival draws a type a* ~ pi, then
/// joins v with probability proportional to kappa(a(v), a*) deg(v)^gamma,
/// deg the graph degree with the root's degree initialized to 1.
/// Marks hold the type index of each vertex.
template <class R>
RootedTree attribute_tree(std::size_t n, const AttributeKernel& kernel, R& rng) {
  require(n >= 1, "attribute_tree: n must be positive");
  kernel.validate();
  const std::size_t s = kernel.types();
  DegreePmf type_law(kernel.pi);
  std::vector<Fenwick> by_type(s, Fenwick(n));
  std::vector<Vertex> parent(n, kNoVertex);
  std::vector<int> mark(n);
  std::vector<std::size_t> deg(n, 0);
  auto weight = [&](std::size_t d) { return kernel.gamma == 0.0 ? 1.0 : std::pow(static_cast<double>(d), kernel.gamma); };
  mark[0] = static_cast<int>(type_law.sample(rng));
  deg[0] = 1;
  by_type[mark[0]].set(0, weight(1));
  std::vector<double> type_w(s);
  for (Vertex k = 1; k < n; ++k) {
    const int star = static_cast<int>(type_law.sample(rng));
    double total = 0.0;
    for (std::size_t b = 0; b < s; ++b) {
      type_w[b] = kernel.kappa[b][star] * by_type[b].total();
      total += type_w[b];
    }
    double u = rng.uniform() * total;
    std::size_t b = 0;
    for (std::size_t last = 0; b < s; ++b) {
      if (type_w[b] > 0.0) last = b;
      if (u < type_w[b]) break;
      u -= type_w[b];
      if (b + 1 == s) {
        b = last;
        break;
      }
    }
    Vertex p = by_type[b].sample(rng);
    parent[k] = p;
    mark[k] = star;
    ++deg[p];
    by_type[b].set(p, weight(deg[p]));
    deg[k] = 1;
    by_type[star].set(k, weight(1));
  }
  RootedTree t(std::move(parent));
  t.set_marks(std::move(mark));
  return t;
}

/// Co-evolving walk model: each arrival picks a uniform existing vertex,
/// walks Z steps toward the root (stopping at the root) and attaches there.
/// Starts from the edge 1 -> 0.
template <class R>
RootedTree coevolving_tree(std::size_t n, const StepPmf& step, R& rng) {
  require(n >= 1, "coevolving_tree: n must be positive");
  std::vector<Vertex> parent(n, kNoVertex);
  if (n >= 2) parent[1] = 0;
  for (Vertex k = 2; k < n; ++k) {
    Vertex u = rng.index(k);
    std::size_t z = step.sample(rng);
    for (std::size_t i = 0; i < z && u != 0; ++i) u = parent[u];
    parent[k] = u;
  }
  return RootedTree(std::move(parent));
}

}  // namespace lwc
