#pragma once

#include <cstddef>
#include <vector>

#include "lwc/canonical.hpp"
#include "lwc/graph.hpp"
#include "lwc/measure.hpp"
#include "lwc/random.hpp"

namespace lwc {

/// Extracts balls B(v, r) from one graph. Keeps per-vertex scratch arrays so
/// that repeated small balls cost O(|ball|) rather than O(n).
class BallExtractor {
 public:
  explicit BallExtractor(const Graph& g) : g_(g), local_(g.n(), kNoVertex) {}

  /// Induced subgraph on vertices within distance `radius` of `center`,
  /// re-rooted at center (id 0), ids in BFS order, multiplicities kept.
  RootedGraph ball(Vertex center, std::size_t radius) {
    require(center < g_.n(), "ball: invalid vertex id " + std::to_string(center));
    visit(center, radius);
    std::vector<std::vector<Vertex>> adj(members_.size());
    for (std::size_t i = 0; i < members_.size(); ++i)
      for (Vertex w : g_.neighbors(members_[i]))
        if (local_[w] != kNoVertex) adj[i].push_back(local_[w]);
    reset();
    Graph out;
    out = Graph::from_adjacency(std::move(adj));
    return RootedGraph(std::move(out), 0);
  }

  /// Number of vertices within distance `radius`.
  std::size_t ball_size(Vertex center, std::size_t radius) {
    visit(center, radius);
    std::size_t s = members_.size();
    reset();
    return s;
  }

 private:
  void visit(Vertex center, std::size_t radius) {
    members_.assign(1, center);
    dist_.assign(1, 0);
    local_[center] = 0;
    for (std::size_t i = 0; i < members_.size(); ++i) {
      if (dist_[i] == radius) continue;
      for (Vertex w : g_.neighbors(members_[i]))
        if (local_[w] == kNoVertex) {
          local_[w] = members_.size();
          members_.push_back(w);
          dist_.push_back(dist_[i] + 1);
        }
    }
  }

  void reset() {
    for (Vertex u : members_) local_[u] = kNoVertex;
  }

  const Graph& g_;
  std::vector<Vertex> local_;
  std::vector<Vertex> members_;
  std::vector<std::size_t> dist_;
};

inline RootedGraph ball(const RootedGraph& g, Vertex center, std::size_t radius) {
  return BallExtractor(g.graph).ball(center, radius);
}

/// Local-weak-convergence distance 1/(1 + R*) between rooted graphs, where
/// R* is the supremum of real radii at which the root balls are isomorphic.
/// Balls only change at integer radii, so if r is the first integer radius
/// where the balls differ then R* = r and the distance is 1/(1 + r).
/// Isomorphic inputs give 0.
inline double lwc_distance(const RootedGraph& a, const RootedGraph& b,
                           std::size_t cap = kDefaultCanonicalCap) {
  BallExtractor ea(a.graph), eb(b.graph);
  std::size_t prev_a = 0, prev_b = 0;
  for (std::size_t r = 0;; ++r) {
    RootedGraph ba = ea.ball(a.root, r);
    RootedGraph bb = eb.ball(b.root, r);
    if (canonical_code(ba, cap) != canonical_code(bb, cap)) return 1.0 / (1.0 + static_cast<double>(r));
    // Both balls stopped growing: they equal the components, which agree.
    if (r > 0 && ba.n() == prev_a && bb.n() == prev_b) return 0.0;
    prev_a = ba.n();
    prev_b = bb.n();
  }
}

/// Uniform root, restricted to its connected component.
template <class R>
RootedGraph standard_construction(const Graph& g, R& rng) {
  require(g.n() >= 1, "standard_construction: empty graph");
  Vertex v = rng.index(g.n());
  return BallExtractor(g).ball(v, g.n());
}

/// (1/n) sum_v delta{code(B(v, k))}, total 1.
inline CodeMeasure empirical_neighborhoods(const Graph& g, std::size_t k,
                                           std::size_t cap = kDefaultCanonicalCap) {
  require(g.n() >= 1, "empirical_neighborhoods: empty graph");
  BallExtractor ex(g);
  CodeMeasure counts;
  for (Vertex v = 0; v < g.n(); ++v) {
    RootedGraph b = ex.ball(v, k);
    try {
      counts.add(canonical_code(b, cap).bytes);
    } catch (const CapExceeded& e) {
      throw CapExceeded(std::string(e.what()) + " (ball around vertex " + std::to_string(v) + ")");
    }
  }
  return counts.normalized();
}

}  // namespace lwc
