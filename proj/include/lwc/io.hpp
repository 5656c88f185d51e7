#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "lwc/error.hpp"
#include "lwc/graph.hpp"

namespace lwc::io {

// Edge-list format: header "n m root", then m lines "u v".
inline void write_edge_list(std::ostream& os, const Graph& g, Vertex root = 0) {
  auto edges = g.edges();
  os << g.n() << ' ' << edges.size() << ' ' << root << '\n';
  for (const auto& e : edges) os << e.u << ' ' << e.v << '\n';
}

inline void write_edge_list(std::ostream& os, const RootedGraph& g) { write_edge_list(os, g.graph, g.root); }

inline RootedGraph read_edge_list(std::istream& is) {
  std::size_t n = 0, m = 0;
  Vertex root = 0;
  require(static_cast<bool>(is >> n >> m >> root), "edge list: bad header");
  require(n >= 1 && root < n, "edge list: bad vertex count or root");
  Graph g(n);
  for (std::size_t i = 0; i < m; ++i) {
    Vertex u, v;
    require(static_cast<bool>(is >> u >> v), "edge list: truncated edge section");
    require(u < n && v < n, "edge list: vertex id out of range");
    g.add_edge(u, v);
  }
  g.finalize();
  return RootedGraph(std::move(g), root);
}

// Tree format: header "n", then n-1 lines "child parent". An optional extra
// column carries a per-vertex real (birth time or edge weight) when
// `column` is non-null; the root's value is written on the header line.
inline void write_tree(std::ostream& os, const RootedTree& t, const std::vector<double>* column = nullptr) {
  os.precision(17);
  os << t.n();
  if (column) os << ' ' << (*column)[0];
  os << '\n';
  for (Vertex v = 1; v < t.n(); ++v) {
    os << v << ' ' << t.parent(v);
    if (column) os << ' ' << (*column)[v];
    os << '\n';
  }
}

inline RootedTree read_tree(std::istream& is) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), "tree: missing header");
  std::size_t n = 0;
  require(static_cast<bool>(std::istringstream(line) >> n) && n >= 1, "tree: bad header");
  std::vector<Vertex> parent(n, kNoVertex);
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    require(static_cast<bool>(std::getline(is, line)), "tree: truncated");
    std::istringstream ls(line);
    Vertex c, p;
    require(static_cast<bool>(ls >> c >> p), "tree: bad line");
    require(c >= 1 && c < n && p < n && !seen[c], "tree: bad child/parent ids");
    seen[c] = true;
    parent[c] = p;
  }
  return RootedTree(std::move(parent));
}

}  // namespace lwc::io
