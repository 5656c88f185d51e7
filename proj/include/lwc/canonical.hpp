#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lwc/error.hpp"
#include "lwc/graph.hpp"

namespace lwc {

/// Byte string identifying a rooted (multi)graph up to root-preserving
/// isomorphism. Tree-shaped inputs get the prefix 'T' followed by the nested
/// parenthesis form; everything else gets 'G' and a canonical edge list.
struct CanonicalCode {
  std::string bytes;
  auto operator<=>(const CanonicalCode&) const = default;
};

inline constexpr std::size_t kDefaultCanonicalCap = 64;

// ---------------------------------------------------------------------------
// Rooted trees: bottom-up sorted-children form.

/// Interns rooted-tree shapes. Two subtrees receive the same id iff they are
/// root-isomorphic; ids are only meaningful inside one interner.
class ShapeInterner {
 public:
  int intern(std::vector<int> child_ids) {
    std::sort(child_ids.begin(), child_ids.end());
    auto [it, fresh] = ids_.try_emplace(std::move(child_ids), static_cast<int>(children_.size()));
    if (fresh) {
      children_.push_back(it->first);
      sizes_.push_back(1);
      for (int c : it->first) sizes_.back() += sizes_[c];
    }
    return it->second;
  }

  /// Class id of every subtree of t (indexed by vertex).
  std::vector<int> classify(const RootedTree& t) {
    std::vector<int> id(t.n(), -1);
    const auto& order = t.bfs_order();
    std::vector<int> kids;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      kids.clear();
      for (Vertex c : t.children(*it)) kids.push_back(id[c]);
      id[*it] = intern(kids);
    }
    return id;
  }

  const std::vector<int>& children_of(int id) const { return children_[id]; }
  std::size_t size_of(int id) const { return sizes_[id]; }
  std::size_t classes() const { return children_.size(); }

  /// Canonical parenthesis string of a class (memoized).
  const std::string& code(int id) {
    if (codes_.size() < children_.size()) codes_.resize(children_.size());
    if (!codes_[id]) {
      // Iterative post-order so deep paths do not overflow the stack.
      std::vector<std::pair<int, bool>> stack{{id, false}};
      while (!stack.empty()) {
        auto [c, expanded] = stack.back();
        stack.pop_back();
        if (codes_[c]) continue;
        if (!expanded) {
          stack.push_back({c, true});
          for (int k : children_[c])
            if (!codes_[k]) stack.push_back({k, false});
          continue;
        }
        std::vector<const std::string*> parts;
        std::size_t len = 2;
        for (int k : children_[c]) {
          parts.push_back(&*codes_[k]);
          len += codes_[k]->size();
        }
        std::sort(parts.begin(), parts.end(), [](auto* a, auto* b) { return *a < *b; });
        std::string s;
        s.reserve(len);
        s.push_back('(');
        for (auto* p : parts) s += *p;
        s.push_back(')');
        codes_[c] = std::move(s);
      }
    }
    return *codes_[id];
  }

 private:
  std::map<std::vector<int>, int> ids_;
  std::vector<std::vector<int>> children_;
  std::vector<std::size_t> sizes_;
  std::vector<std::optional<std::string>> codes_;
};

/// Parenthesis code of the whole tree: "()" is a single vertex.
inline std::string tree_code(const RootedTree& t) {
  ShapeInterner in;
  auto ids = in.classify(t);
  return in.code(ids[0]);
}

/// Parenthesis code of the fringe (subtree) at every vertex.
inline std::vector<std::string> subtree_codes(const RootedTree& t) {
  ShapeInterner in;
  auto ids = in.classify(t);
  std::vector<std::string> out(t.n());
  for (Vertex v = 0; v < t.n(); ++v) out[v] = in.code(ids[v]);
  return out;
}

/// Splits "(AB...)" into the codes of the root's child subtrees.
inline std::vector<std::string_view> root_child_codes(std::string_view code) {
  require(code.size() >= 2 && code.front() == '(' && code.back() == ')', "malformed tree code");
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 1;
  for (std::size_t i = 1; i + 1 < code.size(); ++i) {
    if (code[i] == '(') {
      if (depth == 0) start = i;
      ++depth;
    } else if (code[i] == ')') {
      --depth;
      require(depth >= 0, "malformed tree code");
      if (depth == 0) out.push_back(code.substr(start, i - start + 1));
    } else {
      throw InvalidInput("malformed tree code");
    }
  }
  require(depth == 0, "malformed tree code");
  return out;
}

/// Vertex count of a parenthesis code.
inline std::size_t code_size(std::string_view code) {
  return static_cast<std::size_t>(std::count(code.begin(), code.end(), '('));
}

/// Inverse of tree_code up to isomorphism (vertices in preorder).
inline RootedTree decode_tree(std::string_view code) {
  require(!code.empty() && code.front() == '(', "malformed tree code");
  std::vector<Vertex> parent;
  std::vector<Vertex> stack;
  for (char ch : code) {
    if (ch == '(') {
      parent.push_back(stack.empty() ? kNoVertex : stack.back());
      stack.push_back(parent.size() - 1);
    } else if (ch == ')') {
      require(!stack.empty(), "malformed tree code");
      stack.pop_back();
    } else {
      throw InvalidInput("malformed tree code");
    }
  }
  require(stack.empty() && !parent.empty(), "malformed tree code");
  require(std::count(parent.begin(), parent.end(), kNoVertex) == 1, "code holds more than one tree");
  return RootedTree(std::move(parent));
}

// ---------------------------------------------------------------------------
// General rooted multigraphs: colour refinement plus individualization.

namespace detail {

class GraphCanonizer {
 public:
  GraphCanonizer(const RootedGraph& g, std::size_t leaf_budget)
      : g_(g.graph), budget_(leaf_budget) {
    const std::size_t n = g_.n();
    std::vector<std::vector<std::pair<Vertex, std::uint64_t>>> nb(n);
    std::vector<std::uint64_t> loops(n, 0);
    for (Vertex u = 0; u < n; ++u) {
      const auto& a = g_.neighbors(u);
      for (std::size_t i = 0; i < a.size();) {
        std::size_t j = i;
        while (j < a.size() && a[j] == a[i]) ++j;
        if (a[i] == u)
          loops[u] = (j - i) / 2;
        else
          nb[u].push_back({a[i], j - i});
        i = j;
      }
    }
    // Peel pendant trees into labels; only the cyclic core (plus the root)
    // goes through the individualization search.
    std::vector<std::vector<std::string>> hung(n);
    std::vector<std::size_t> live(n);
    std::vector<char> gone(n, 0);
    // Peeling a tree component away from the root is order-dependent, so
    // stay inside the root's component.
    std::vector<char> reached(n, 0);
    std::vector<Vertex> stack{g.root};
    reached[g.root] = 1;
    for (std::size_t i = 0; i < stack.size(); ++i)
      for (auto [w, m] : nb[stack[i]])
        if (!reached[w]) {
          reached[w] = 1;
          stack.push_back(w);
        }
    stack.clear();
    for (Vertex u = 0; u < n; ++u) {
      live[u] = nb[u].size();
      if (u != g.root && reached[u] && live[u] == 1) stack.push_back(u);
    }
    auto label_of = [&](Vertex u, std::uint64_t mult) {
      std::sort(hung[u].begin(), hung[u].end());
      std::string l = "[" + std::to_string(loops[u]) + "," + std::to_string(mult);
      for (auto& h : hung[u]) l += h;
      return l + "]";
    };
    while (!stack.empty()) {
      Vertex u = stack.back();
      stack.pop_back();
      if (gone[u] || live[u] != 1) continue;
      for (auto [w, m] : nb[u])
        if (!gone[w]) {
          gone[u] = 1;
          hung[w].push_back(label_of(u, m));
          if (--live[w] == 1 && w != g.root) stack.push_back(w);
          break;
        }
    }
    std::vector<Vertex> id(n, kNoVertex);
    for (Vertex u = 0; u < n; ++u)
      if (!gone[u]) {
        id[u] = core_.size();
        core_.push_back(u);
      }
    root_ = id[g.root];
    nbrs_.resize(core_.size());
    std::vector<std::string> labels;
    for (Vertex u : core_) {
      for (auto [w, m] : nb[u])
        if (!gone[w]) nbrs_[id[u]].push_back({id[w], m});
      labels.push_back(label_of(u, 0));
    }
    label_names_ = labels;
    std::sort(label_names_.begin(), label_names_.end());
    label_names_.erase(std::unique(label_names_.begin(), label_names_.end()), label_names_.end());
    for (auto& l : labels)
      label_.push_back(std::lower_bound(label_names_.begin(), label_names_.end(), l) - label_names_.begin());
  }

  std::string run() {
    const std::size_t n = core_.size();
    // Initial colours: (distance from root, degree, loop count).
    std::vector<std::size_t> dist(n, kNoVertex);
    std::vector<Vertex> queue{root_};
    dist[root_] = 0;
    for (std::size_t i = 0; i < queue.size(); ++i)
      for (auto [w, m] : nbrs_[queue[i]])
        if (dist[w] == kNoVertex) {
          dist[w] = dist[queue[i]] + 1;
          queue.push_back(w);
        }
    std::vector<std::vector<std::uint64_t>> sig(n);
    for (Vertex u = 0; u < n; ++u) sig[u] = {dist[u], nbrs_[u].size(), label_[u]};
    std::vector<int> colour = rank(sig);
    refine(colour);
    search(colour);
    std::string out = "G" + std::to_string(g_.n()) + ":";
    for (auto& l : label_names_) out += l;
    out.push_back(':');
    for (auto x : best_) {
      out += std::to_string(x);
      out.push_back(',');
    }
    return out;
  }

 private:
  static std::vector<int> rank(const std::vector<std::vector<std::uint64_t>>& sig) {
    std::vector<std::size_t> idx(sig.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return sig[a] < sig[b]; });
    std::vector<int> colour(sig.size());
    int c = -1;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (i == 0 || sig[idx[i]] != sig[idx[i - 1]]) ++c;
      colour[idx[i]] = c;
    }
    return colour;
  }

  static int distinct(const std::vector<int>& colour) {
    return colour.empty() ? 0 : *std::max_element(colour.begin(), colour.end()) + 1;
  }

  void refine(std::vector<int>& colour) const {
    const std::size_t n = colour.size();
    int count = distinct(colour);
    while (true) {
      std::vector<std::vector<std::uint64_t>> sig(n);
      for (Vertex u = 0; u < n; ++u) {
        std::vector<std::pair<std::uint64_t, std::uint64_t>> around;
        for (auto [w, m] : nbrs_[u]) around.push_back({static_cast<std::uint64_t>(colour[w]), m});
        std::sort(around.begin(), around.end());
        auto& s = sig[u];
        s.push_back(static_cast<std::uint64_t>(colour[u]));
        for (auto [c, m] : around) {
          s.push_back(c);
          s.push_back(m);
        }
      }
      colour = rank(sig);
      int next = distinct(colour);
      if (next == count) return;
      count = next;
    }
  }

  void search(const std::vector<int>& colour) {
    const std::size_t n = colour.size();
    if (static_cast<std::size_t>(distinct(colour)) == n) {
      if (++leaves_ > budget_) throw CapExceeded("canonicalization search budget exhausted");
      std::vector<std::array<std::uint64_t, 3>> edges;
      for (Vertex u = 0; u < n; ++u)
        for (auto [w, m] : nbrs_[u])
          if (colour[u] < colour[w])
            edges.push_back({static_cast<std::uint64_t>(colour[u]), static_cast<std::uint64_t>(colour[w]), m});
      std::sort(edges.begin(), edges.end());
      // Labels indexed by colour.
      std::vector<std::uint64_t> enc(n);
      for (Vertex u = 0; u < n; ++u) enc[colour[u]] = label_[u];
      for (auto& e : edges) enc.insert(enc.end(), e.begin(), e.end());
      if (best_.empty() || enc < best_) best_ = std::move(enc);
      return;
    }
    // First non-singleton cell.
    std::vector<std::size_t> cell_size(n, 0);
    for (int c : colour) ++cell_size[c];
    int target = 0;
    while (cell_size[target] < 2) ++target;
    for (Vertex v = 0; v < n; ++v) {
      if (colour[v] != target) continue;
      std::vector<int> next(n);
      for (Vertex u = 0; u < n; ++u) next[u] = 2 * colour[u] + ((colour[u] == target && u != v) ? 1 : 0);
      std::vector<std::vector<std::uint64_t>> sig(n);
      for (Vertex u = 0; u < n; ++u) sig[u] = {static_cast<std::uint64_t>(next[u])};
      next = rank(sig);
      refine(next);
      search(next);
    }
  }

  const Graph& g_;
  Vertex root_;
  std::size_t budget_;
  std::size_t leaves_ = 0;
  std::vector<std::vector<std::pair<Vertex, std::uint64_t>>> nbrs_;
  std::vector<Vertex> core_;
  std::vector<std::uint64_t> label_;
  std::vector<std::string> label_names_;
  std::vector<std::uint64_t> best_;
};

}  // namespace detail

/// True when the graph is connected, simple and has n-1 edges.
inline bool is_tree(const Graph& g) {
  if (g.n() == 0 || g.edge_count() != g.n() - 1 || !g.is_simple()) return false;
  std::vector<std::size_t> label;
  return g.components(label) == 1;
}

/// Orient a tree-shaped graph away from `root`.
inline RootedTree orient_tree(const RootedGraph& g) {
  const std::size_t n = g.n();
  std::vector<Vertex> id(n, kNoVertex);
  std::vector<Vertex> order{g.root};
  std::vector<Vertex> parent{kNoVertex};
  id[g.root] = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (Vertex w : g.graph.neighbors(order[i]))
      if (id[w] == kNoVertex) {
        id[w] = order.size();
        order.push_back(w);
        parent.push_back(i);
      }
  require(order.size() == n, "graph is not connected");
  return RootedTree(std::move(parent));
}

/// Canonical code of a rooted multigraph. Trees have no size cap; other
/// graphs must have at most `cap` vertices.
inline CanonicalCode canonical_code(const RootedGraph& g, std::size_t cap = kDefaultCanonicalCap,
                                    std::size_t leaf_budget = 200000) {
  if (is_tree(g.graph)) return {"T" + tree_code(orient_tree(g))};
  if (g.n() > cap)
    throw CapExceeded("canonical_code: non-tree graph with " + std::to_string(g.n()) +
                      " vertices exceeds cap " + std::to_string(cap));
  return {detail::GraphCanonizer(g, leaf_budget).run()};
}

inline CanonicalCode canonical_code(const RootedTree& t) { return {"T" + tree_code(t)}; }

}  // namespace lwc
