#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "lwc/error.hpp"

namespace lwc {

using Vertex = std::size_t;
inline constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();

struct Edge {
  Vertex u;
  Vertex v;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Finite undirected multigraph stored as sorted neighbor lists.
/// A self-loop at u lists u twice in adj(u), so it adds 2 to deg(u).
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n) : adj_(n) {}

  Graph(std::size_t n, const std::vector<Edge>& edges) : adj_(n) {
    for (const auto& e : edges) add_edge(e.u, e.v);
    finalize();
  }

  /// Takes ownership of adjacency lists; checks symmetry.
  static Graph from_adjacency(std::vector<std::vector<Vertex>> adj) {
    Graph g;
    g.adj_ = std::move(adj);
    g.finalize();
    g.validate();
    return g;
  }

  std::size_t n() const { return adj_.size(); }
  const std::vector<Vertex>& neighbors(Vertex v) const { return adj_[v]; }
  std::size_t degree(Vertex v) const { return adj_[v].size(); }
  const std::vector<std::vector<Vertex>>& adjacency() const { return adj_; }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& a : adj_) twice += a.size();
    return twice / 2;
  }

  /// Each edge once with u <= v; loops once; parallel edges repeated.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (Vertex u = 0; u < n(); ++u) {
      std::size_t loops = 0;
      for (Vertex v : adj_[u]) {
        if (v > u) out.push_back({u, v});
        else if (v == u && (loops++ % 2 == 0)) out.push_back({u, u});
      }
    }
    return out;
  }

  std::size_t multiplicity(Vertex u, Vertex v) const {
    auto [lo, hi] = std::equal_range(adj_[u].begin(), adj_[u].end(), v);
    std::size_t m = static_cast<std::size_t>(hi - lo);
    return u == v ? m / 2 : m;
  }

  bool is_simple() const {
    for (Vertex u = 0; u < n(); ++u) {
      const auto& a = adj_[u];
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == u) return false;
        if (i > 0 && a[i] == a[i - 1]) return false;
      }
    }
    return true;
  }

  /// Unsorted insertion; call finalize() afterwards.
  void add_edge(Vertex u, Vertex v) {
    require(u < n() && v < n(), "edge endpoint out of range");
    adj_[u].push_back(v);
    adj_[v].push_back(u);
  }

  void finalize() {
    for (auto& a : adj_) std::sort(a.begin(), a.end());
  }

  /// Connected-component labels; returns number of components.
  std::size_t components(std::vector<std::size_t>& label) const {
    label.assign(n(), kNoVertex);
    std::size_t c = 0;
    std::vector<Vertex> stack;
    for (Vertex s = 0; s < n(); ++s) {
      if (label[s] != kNoVertex) continue;
      label[s] = c;
      stack.push_back(s);
      while (!stack.empty()) {
        Vertex u = stack.back();
        stack.pop_back();
        for (Vertex w : adj_[u])
          if (label[w] == kNoVertex) {
            label[w] = c;
            stack.push_back(w);
          }
      }
      ++c;
    }
    return c;
  }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  void validate() const {
    for (Vertex u = 0; u < n(); ++u)
      for (Vertex v : adj_[u]) {
        require(v < n(), "neighbor id out of range");
        if (v != u)
          require(multiplicity(u, v) == multiplicity(v, u), "adjacency is not symmetric");
        else
          require(std::count(adj_[u].begin(), adj_[u].end(), u) % 2 == 0,
                  "self-loop must appear twice in its own list");
      }
  }

  std::vector<std::vector<Vertex>> adj_;
};

/// A graph with a distinguished root vertex.
struct RootedGraph {
  Graph graph;
  Vertex root = 0;

  RootedGraph() : graph(1) {}
  RootedGraph(Graph g, Vertex r) : graph(std::move(g)), root(r) {
    require(root < graph.n(), "root out of range");
  }
  std::size_t n() const { return graph.n(); }
};

/// Rooted tree in parent-array form, root at index 0.
class RootedTree {
 public:
  RootedTree() : RootedTree(std::vector<Vertex>{kNoVertex}) {}

  explicit RootedTree(std::vector<Vertex> parent) : parent_(std::move(parent)) { build(); }

  static RootedTree point() { return RootedTree(); }

  std::size_t n() const { return parent_.size(); }
  Vertex root() const { return 0; }
  Vertex parent(Vertex v) const { return parent_[v]; }
  const std::vector<Vertex>& parents() const { return parent_; }
  const std::vector<Vertex>& children(Vertex v) const { return children_[v]; }
  std::size_t child_count(Vertex v) const { return children_[v].size(); }
  std::size_t depth(Vertex v) const { return depth_[v]; }
  /// Vertices in breadth-first order from the root.
  const std::vector<Vertex>& bfs_order() const { return order_; }

  const std::vector<int>& marks() const { return marks_; }
  bool has_marks() const { return !marks_.empty(); }
  void set_marks(std::vector<int> m) {
    require(m.size() == n(), "mark vector size mismatch");
    marks_ = std::move(m);
  }

  const std::vector<double>& birth_times() const { return birth_; }
  bool has_birth_times() const { return !birth_.empty(); }
  void set_birth_times(std::vector<double> b) {
    require(b.size() == n(), "birth time vector size mismatch");
    for (Vertex v = 1; v < n(); ++v)
      require(b[v] >= b[parent_[v]] && b[v] >= 0.0, "birth times must increase away from the root");
    birth_ = std::move(b);
  }

  std::size_t height() const {
    std::size_t h = 0;
    for (auto d : depth_) h = std::max(h, d);
    return h;
  }

  std::vector<std::size_t> subtree_sizes() const {
    std::vector<std::size_t> size(n(), 1);
    for (auto it = order_.rbegin(); it != order_.rend(); ++it)
      if (*it != 0) size[parent_[*it]] += size[*it];
    return size;
  }

  /// Subtree below v, re-rooted at v, vertices in BFS order. Marks and birth
  /// times are carried along.
  RootedTree subtree(Vertex v) const {
    std::vector<Vertex> ids{v};
    std::vector<Vertex> par{kNoVertex};
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (Vertex c : children_[ids[i]]) {
        ids.push_back(c);
        par.push_back(i);
      }
    RootedTree t(std::move(par));
    if (has_marks()) {
      std::vector<int> m;
      for (Vertex u : ids) m.push_back(marks_[u]);
      t.marks_ = std::move(m);
    }
    if (has_birth_times()) {
      std::vector<double> b;
      for (Vertex u : ids) b.push_back(birth_[u]);
      t.birth_ = std::move(b);
    }
    return t;
  }

  /// Undirected graph view rooted at 0.
  RootedGraph as_graph() const {
    Graph g(n());
    for (Vertex v = 1; v < n(); ++v) g.add_edge(v, parent_[v]);
    g.finalize();
    return RootedGraph(std::move(g), 0);
  }

  friend bool operator==(const RootedTree& a, const RootedTree& b) {
    return a.parent_ == b.parent_ && a.marks_ == b.marks_ && a.birth_ == b.birth_;
  }

 private:
  void build() {
    require(!parent_.empty(), "tree must have at least one vertex");
    require(parent_[0] == kNoVertex, "vertex 0 must be the root");
    const std::size_t m = parent_.size();
    children_.assign(m, {});
    for (Vertex v = 1; v < m; ++v) {
      require(parent_[v] < m && parent_[v] != v, "invalid parent id");
      children_[parent_[v]].push_back(v);
    }
    order_.clear();
    order_.reserve(m);
    order_.push_back(0);
    depth_.assign(m, 0);
    for (std::size_t i = 0; i < order_.size(); ++i)
      for (Vertex c : children_[order_[i]]) {
        depth_[c] = depth_[order_[i]] + 1;
        order_.push_back(c);
      }
    require(order_.size() == m, "parent array has a cycle or a second root");
  }

  std::vector<Vertex> parent_;
  std::vector<std::vector<Vertex>> children_;
  std::vector<std::size_t> depth_;
  std::vector<Vertex> order_;
  std::vector<int> marks_;
  std::vector<double> birth_;
};

/// Directed graph with out- and in-lists (edge u -> v).
class DiGraph {
 public:
  explicit DiGraph(std::size_t n = 0) : out_(n), in_(n) {}

  /// Offspring -> parent orientation of a rooted tree.
  static DiGraph from_tree(const RootedTree& t) {
    DiGraph g(t.n());
    for (Vertex v = 1; v < t.n(); ++v) g.add_edge(v, t.parent(v));
    return g;
  }

  std::size_t n() const { return out_.size(); }
  void add_edge(Vertex u, Vertex v) {
    require(u < n() && v < n(), "edge endpoint out of range");
    out_[u].push_back(v);
    in_[v].push_back(u);
  }
  const std::vector<Vertex>& out(Vertex v) const { return out_[v]; }
  const std::vector<Vertex>& in(Vertex v) const { return in_[v]; }

 private:
  std::vector<std::vector<Vertex>> out_;
  std::vector<std::vector<Vertex>> in_;
};

}  // namespace lwc
