#pragma once

#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "lwc/error.hpp"
#include "lwc/generators.hpp"
#include "lwc/graph.hpp"
#include "lwc/random.hpp"

namespace lwc {

/// Observation time of a continuous-time process: fixed, or an independent
/// Exp(rate) draw.
struct Horizon {
  double value = 0.0;
  bool random = false;

  static Horizon fixed(double t) {
    require(t >= 0.0, "horizon must be nonnegative");
    return {t, false};
  }
  static Horizon exponential(double rate) {
    require(rate > 0.0, "horizon rate must be positive");
    return {rate, true};
  }

  template <class R>
  double draw(R& rng) const {
    return random ? rng.exponential(value) : value;
  }
};

/// Genealogy of a continuous-time branching process; birth times are stored
/// on the tree.
struct CTBPTree {
  RootedTree tree;
  double horizon = 0.0;
  std::size_t size() const { return tree.n(); }
};

inline constexpr std::size_t kDefaultPopulationCap = 1000000;

/// Rate-one Yule process. Every individual gives birth at rate 1, so the
/// next event is Exp(population) away and the parent is uniform.
template <class R>
CTBPTree yule_sample(const Horizon& horizon, R& rng, std::size_t cap = kDefaultPopulationCap) {
  const double t_end = horizon.draw(rng);
  std::vector<Vertex> parent{kNoVertex};
  std::vector<double> birth{0.0};
  double t = 0.0;
  while (true) {
    const std::size_t m = parent.size();
    t += rng.exponential(static_cast<double>(m));
    if (t > t_end) break;
    if (m >= cap) throw CapExceeded("yule_sample: population cap reached at time " + std::to_string(t));
    parent.push_back(rng.index(m));
    birth.push_back(t);
  }
  CTBPTree out{RootedTree(std::move(parent)), t_end};
  out.tree.set_birth_times(std::move(birth));
  return out;
}

/// Yule process run until the population first reaches k.
template <class R>
CTBPTree yule_until_population(std::size_t k, R& rng) {
  require(k >= 1, "population target must be positive");
  std::vector<Vertex> parent{kNoVertex};
  std::vector<double> birth{0.0};
  double t = 0.0;
  while (parent.size() < k) {
    const std::size_t m = parent.size();
    t += rng.exponential(static_cast<double>(m));
    parent.push_back(rng.index(m));
    birth.push_back(t);
  }
  CTBPTree out{RootedTree(std::move(parent)), t};
  out.tree.set_birth_times(std::move(birth));
  return out;
}

/// Branching process where an individual's (k+1)-th birth follows its k-th
/// after an Exp(f(k)) gap. Stops at the horizon or, if `stop_population` is
/// nonzero, when the population reaches it.
template <class R>
CTBPTree ctbp_sample(const AttachmentFn& f, const Horizon& horizon, R& rng,
                     std::size_t cap = kDefaultPopulationCap, std::size_t stop_population = 0) {
  const double t_end = horizon.draw(rng);
  std::vector<Vertex> parent{kNoVertex};
  std::vector<double> birth{0.0};
  std::vector<std::size_t> kids{0};
  using Event = std::pair<double, Vertex>;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> pq;
  auto schedule = [&](Vertex v, double now) {
    double rate = f(kids[v]);
    require(rate > 0.0 && std::isfinite(rate), "attachment function must be positive");
    pq.push({now + rng.exponential(rate), v});
  };
  schedule(0, 0.0);
  double t = 0.0;
  while (!pq.empty()) {
    if (stop_population && parent.size() >= stop_population) break;
    auto [when, v] = pq.top();
    if (when > t_end) break;
    pq.pop();
    if (parent.size() >= cap)
      throw CapExceeded("ctbp_sample: population cap reached at time " + std::to_string(when) +
                        " (explosive attachment function?)");
    t = when;
    Vertex child = parent.size();
    parent.push_back(v);
    birth.push_back(t);
    kids.push_back(0);
    ++kids[v];
    schedule(v, t);
    schedule(child, t);
  }
  CTBPTree out{RootedTree(std::move(parent)), stop_population ? t : t_end};
  out.tree.set_birth_times(std::move(birth));
  return out;
}

struct MalthusianRate {
  double lambda = 0.0;
  double residual = 0.0;  ///< |Laplace transform at lambda - 1|
};

/// Laplace transform of the birth intensity,
///   L(lambda) = sum_{k>=1} prod_{j<k} f(j) / (lambda + f(j)),
/// i.e. sum_k E exp(-lambda tau_k) over birth times tau_k, thinned by
/// `retention`. Closed forms for the constant and affine kinds.
inline double birth_laplace(const AttachmentFn& f, double lambda, double retention = 1.0,
                            std::size_t max_terms = 10000000) {
  require(lambda > 0.0, "laplace transform needs lambda > 0");
  switch (f.kind()) {
    case AttachmentFn::Kind::constant:
      return retention * f.offset() / lambda;
    case AttachmentFn::Kind::affine:
      return lambda > 1.0 ? retention * f.offset() / (lambda - 1.0) : INFINITY;
    case AttachmentFn::Kind::general:
      break;
  }
  double sum = 0.0, term = 1.0;
  for (std::size_t k = 0; k < max_terms; ++k) {
    const double fk = f(k);
    term *= fk / (lambda + fk);
    sum += term;
    if (term < 1e-17 * sum) return retention * sum;
  }
  return INFINITY;
}

/// Root of L(lambda) = 1. The affine case f(k) = k + a has mu(dt) = a e^t dt
/// and lambda = 1 + a; the constant case f = c has lambda = c.
inline MalthusianRate malthusian_rate(const AttachmentFn& f, double retention = 1.0) {
  require(retention > 0.0 && retention <= 1.0, "retention must be in (0, 1]");
  MalthusianRate out;
  if (f.kind() == AttachmentFn::Kind::constant) {
    out.lambda = retention * f.offset();
  } else if (f.kind() == AttachmentFn::Kind::affine) {
    out.lambda = 1.0 + retention * f.offset();
  } else {
    double hi = 1.0;
    int guard = 0;
    while (!(birth_laplace(f, hi, retention) < 1.0)) {
      hi *= 2.0;
      if (++guard > 60) throw NotConverged("malthusian_rate: no root (explosive attachment function?)");
    }
    double lo = hi / 2.0;
    guard = 0;
    while (birth_laplace(f, lo, retention) < 1.0) {
      lo /= 2.0;
      if (++guard > 60) throw NotConverged("malthusian_rate: no root (subcritical?)");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
      double mid = 0.5 * (lo + hi);
      (birth_laplace(f, mid, retention) > 1.0 ? lo : hi) = mid;
    }
    out.lambda = 0.5 * (lo + hi);
  }
  out.residual = std::abs(birth_laplace(f, out.lambda, retention) - 1.0);
  return out;
}

/// p°_k = (k + 1) p_{k+1} / mean.
inline DegreePmf size_biased(const DegreePmf& p) {
  require(p.mean() > 0.0, "size_biased: zero mean");
  const auto& q = p.probs();
  if (q.size() == 1) throw InvalidInput("size_biased: zero mean");
  std::vector<double> out(q.size() - 1);
  for (std::size_t k = 0; k + 1 < q.size(); ++k) out[k] = static_cast<double>(k + 1) * q[k + 1] / p.mean();
  return DegreePmf(std::move(out));
}

/// Unimodular Galton-Watson tree: root offspring ~ p, everyone else ~ p°,
/// cut after `generations` generations.
template <class R>
RootedTree unimodular_bp_sample(const DegreePmf& p, std::size_t generations, R& rng,
                                std::size_t cap = kDefaultPopulationCap) {
  std::optional<DegreePmf> biased;
  if (p.mean() > 0.0) biased = size_biased(p);
  std::vector<Vertex> parent{kNoVertex};
  std::vector<std::size_t> gen{0};
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (gen[i] == generations) continue;
    std::size_t kids = i == 0 ? p.sample(rng) : biased->sample(rng);
    if (parent.size() + kids > cap) throw CapExceeded("unimodular_bp_sample: population cap exceeded");
    for (std::size_t c = 0; c < kids; ++c) {
      parent.push_back(i);
      gen.push_back(gen[i] + 1);
    }
  }
  return RootedTree(std::move(parent));
}

/// Keeps each edge independently with probability c and returns the root's
/// cluster (ids in BFS order; birth times and marks carried along).
template <class R>
RootedTree percolate(const RootedTree& t, double c, R& rng) {
  require(c >= 0.0 && c <= 1.0, "percolate: retention must be in [0, 1]");
  std::vector<Vertex> ids{0};
  std::vector<Vertex> par{kNoVertex};
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (Vertex ch : t.children(ids[i]))
      if (rng.uniform() < c) {
        ids.push_back(ch);
        par.push_back(i);
      }
  RootedTree out(std::move(par));
  if (t.has_birth_times()) {
    std::vector<double> b;
    for (Vertex v : ids) b.push_back(t.birth_times()[v]);
    out.set_birth_times(std::move(b));
  }
  if (t.has_marks()) {
    std::vector<int> m;
    for (Vertex v : ids) m.push_back(t.marks()[v]);
    out.set_marks(std::move(m));
  }
  return out;
}

/// Tree with a weight on each vertex's edge to its parent (root weight 0).
struct WeightedTree {
  RootedTree tree;
  std::vector<double> weight;
};

/// Poisson weighted infinite tree truncated to `depth` generations and to
/// edge weights <= cutoff: each vertex's children sit at the points of an
/// independent rate-one Poisson process on [0, cutoff].
template <class R>
WeightedTree pwit_sample(std::size_t depth, double cutoff, R& rng, std::size_t cap = kDefaultPopulationCap) {
  require(cutoff > 0.0 && std::isfinite(cutoff), "pwit_sample: cutoff must be positive and finite");
  std::vector<Vertex> parent{kNoVertex};
  std::vector<double> weight{0.0};
  std::vector<std::size_t> gen{0};
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (gen[i] == depth) continue;
    for (double x = rng.exponential(1.0); x <= cutoff; x += rng.exponential(1.0)) {
      if (parent.size() >= cap) throw CapExceeded("pwit_sample: population cap exceeded");
      parent.push_back(i);
      weight.push_back(x);
      gen.push_back(gen[i] + 1);
    }
  }
  return {RootedTree(std::move(parent)), std::move(weight)};
}

}  // namespace lwc
