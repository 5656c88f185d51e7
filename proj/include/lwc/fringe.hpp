#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "lwc/canonical.hpp"
#include "lwc/error.hpp"
#include "lwc/graph.hpp"
#include "lwc/measure.hpp"
#include "lwc/random.hpp"

namespace lwc {

/// Extended fringe (f_0, ..., f_h) of a vertex v: f_0 is the subtree below
/// v, f_i the subtree below the i-th ancestor with the branch through the
/// (i-1)-th ancestor removed. `truncated` is set when the requested depth
/// went past the root.
struct FringeStack {
  std::vector<RootedTree> trees;
  bool truncated = false;
};

namespace detail {

// Subtree below `a`, skipping the child `skip` (and everything under it).
inline RootedTree subtree_without(const RootedTree& t, Vertex a, Vertex skip) {
  std::vector<Vertex> ids{a};
  std::vector<Vertex> par{kNoVertex};
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (Vertex c : t.children(ids[i]))
      if (c != skip) {
        ids.push_back(c);
        par.push_back(i);
      }
  return RootedTree(std::move(par));
}

// Graft `below` as a new child of the root of `above`.
inline RootedTree graft(const RootedTree& above, const RootedTree& below) {
  std::vector<Vertex> par = above.parents();
  const Vertex off = par.size();
  for (Vertex v = 0; v < below.n(); ++v) par.push_back(v == 0 ? 0 : below.parent(v) + off);
  return RootedTree(std::move(par));
}

inline const std::string kStackSep = "|";
inline const std::string kTruncatedTag = "|~";

}  // namespace detail

inline FringeStack fringe_decompose(const RootedTree& t, Vertex v, std::size_t k) {
  require(v < t.n(), "fringe_decompose: invalid vertex");
  FringeStack out;
  out.trees.push_back(t.subtree(v));
  out.truncated = k > t.depth(v);
  Vertex below = v;
  for (std::size_t i = 1; i <= k && below != 0; ++i) {
    Vertex a = t.parent(below);
    out.trees.push_back(detail::subtree_without(t, a, below));
    below = a;
  }
  return out;
}

/// Re-attaches the pieces: the result is the subtree below the top ancestor.
inline RootedTree assemble(const FringeStack& s) {
  require(!s.trees.empty(), "assemble: empty stack");
  RootedTree cur = s.trees.front();
  for (std::size_t i = 1; i < s.trees.size(); ++i) cur = detail::graft(s.trees[i], cur);
  return cur;
}

/// Monotone representation (t̄_0, ..., t̄_h): t̄_i is the whole subtree
/// below the i-th ancestor.
inline std::vector<RootedTree> monotone_representation(const FringeStack& s) {
  std::vector<RootedTree> out;
  for (std::size_t i = 0; i < s.trees.size(); ++i) {
    out.push_back(i == 0 ? s.trees[0] : detail::graft(s.trees[i], out.back()));
  }
  return out;
}

/// "code(f_0)|code(f_1)|...", with a trailing "|~" when truncated.
inline std::string stack_code(const FringeStack& s) {
  std::string out;
  for (std::size_t i = 0; i < s.trees.size(); ++i) {
    if (i) out += detail::kStackSep;
    out += tree_code(s.trees[i]);
  }
  if (s.truncated) out += detail::kTruncatedTag;
  return out;
}

/// Level-0 projection of a stack code.
inline std::string stack_level0(const std::string& code) { return code.substr(0, code.find('|')); }

/// (1/n) sum_v delta{F_k(v, t)}. Vertices closer than k to the root carry
/// the truncation tag.
inline CodeMeasure empirical_fringe(const RootedTree& t, std::size_t k) {
  ShapeInterner in;
  const auto id = in.classify(t);
  CodeMeasure m;
  std::vector<int> kids;
  std::string key;
  for (Vertex v = 0; v < t.n(); ++v) {
    key = in.code(id[v]);
    Vertex below = v;
    for (std::size_t i = 1; i <= k && below != 0; ++i) {
      Vertex a = t.parent(below);
      kids.clear();
      bool dropped = false;
      for (Vertex c : t.children(a)) {
        if (c == below && !dropped) {
          dropped = true;
          continue;
        }
        kids.push_back(id[c]);
      }
      key += detail::kStackSep;
      key += in.code(in.intern(kids));
      below = a;
    }
    if (k > t.depth(v)) key += detail::kTruncatedTag;
    m.add(key);
  }
  return m.normalized();
}

/// Distribution of |f_0(v, t)| over a uniform vertex.
inline IntMeasure fringe_size_pmf(const RootedTree& t) {
  IntMeasure m;
  for (auto s : t.subtree_sizes()) m.add(static_cast<std::int64_t>(s));
  return m.normalized();
}

/// Number of root children of s whose subtree is isomorphic to t.
inline std::size_t subtree_count_Q(std::string_view s_code, std::string_view t_code) {
  std::size_t q = 0;
  for (auto c : root_child_codes(s_code))
    if (c == t_code) ++q;
  return q;
}

inline std::size_t subtree_count_Q(const RootedTree& s, const RootedTree& t) {
  const std::string s_code = tree_code(s), t_code = tree_code(t);
  return subtree_count_Q(std::string_view(s_code), std::string_view(t_code));
}


/// Probability law over tree codes. Atoms are stored as codes and decoded
/// on demand.
struct FringeLaw {
  enum class Source { empirical, sampler };
  CodeMeasure atoms;  ///< normalized
  Source source = Source::empirical;

  static FringeLaw from_measure(const CodeMeasure& m, Source src = Source::empirical) {
    FringeLaw law;
    law.atoms = m.normalized();
    law.source = src;
    for (const auto& [code, w] : law.atoms.atoms()) {
      require(code.find('|') == std::string::npos, "fringe law atoms must be single tree codes");
      (void)w;
    }
    return law;
  }
};

/// sum_t |sum_s law(s) Q(s, t) - law(t)| over trees t with at most
/// `support_cap` vertices. Zero means the law is stationary on that finite
/// projection.
inline double stationarity_residual(const FringeLaw& law, std::size_t support_cap = 6) {
  std::map<std::string, double> flow;
  for (const auto& [s, w] : law.atoms.atoms()) {
    for (auto c : root_child_codes(s))
      if (code_size(c) <= support_cap) flow[std::string(c)] += w;
  }
  double res = 0.0;
  for (const auto& [t, f] : flow) res += std::abs(f - law.atoms.weight(t));
  for (const auto& [t, w] : law.atoms.atoms())
    if (code_size(t) <= support_cap && !flow.count(t)) res += w;
  return res;
}

/// Samples extended fringes (f_0, ..., f_depth) from the law obtained by
/// weighting the top tree by law(t̄_depth) and each level by
/// Q(t̄_i, t̄_{i-1}). The product of Q's counts the vertices at distance
/// `depth` below the root of t̄_depth with a matching ancestral chain, so the
/// top tree is drawn proportionally to law(t) * #(vertices at depth `depth`)
/// and the chain is unwrapped from a uniform such vertex.
class ExtendedFringeSampler {
 public:
  ExtendedFringeSampler(const FringeLaw& law, std::size_t depth) : depth_(depth) {
    double total = 0.0;
    for (const auto& [code, w] : law.atoms.atoms()) {
      std::size_t z = count_at_depth(code, depth);
      if (z == 0 || w <= 0.0) continue;
      total += w * static_cast<double>(z);
      codes_.push_back(code);
      cdf_.push_back(total);
    }
    if (codes_.empty())
      throw InvalidInput("extended_fringe_sampler: no atom reaches depth " + std::to_string(depth) +
                         " (inconsistent law)");
  }

  /// Normalizing constant sum_t law(t) Z_depth(t); 1 for a stationary law.
  double mass() const { return cdf_.empty() ? 0.0 : cdf_.back(); }

  template <class R>
  FringeStack sample(R& rng) {
    double u = rng.uniform() * cdf_.back();
    std::size_t i = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
    i = std::min(i, codes_.size() - 1);
    auto it = cache_.find(i);
    if (it == cache_.end()) {
      RootedTree t = decode_tree(codes_[i]);
      std::vector<Vertex> level;
      for (Vertex v = 0; v < t.n(); ++v)
        if (t.depth(v) == depth_) level.push_back(v);
      it = cache_.emplace(i, Entry{std::move(t), std::move(level)}).first;
    }
    const Entry& e = it->second;
    Vertex w = e.level[rng.index(e.level.size())];
    return fringe_decompose(e.tree, w, depth_);
  }

 private:
  struct Entry {
    RootedTree tree;
    std::vector<Vertex> level;
  };

  static std::size_t count_at_depth(const std::string& code, std::size_t depth) {
    std::size_t d = 0, count = 0;
    for (char ch : code) {
      if (ch == '(') {
        if (d == depth) ++count;
        ++d;
      } else {
        --d;
      }
    }
    return count;
  }

  std::size_t depth_;
  std::vector<std::string> codes_;
  std::vector<double> cdf_;
  std::unordered_map<std::size_t, Entry> cache_;
};

template <class R>
FringeStack extended_fringe_sampler(const FringeLaw& law, std::size_t depth, R& rng) {
  return ExtendedFringeSampler(law, depth).sample(rng);
}

/// Measure JSON with fringe metadata.
inline nlohmann::json fringe_to_json(const CodeMeasure& m, std::size_t depth, bool has_truncated) {
  auto j = to_json(m);
  j["kind"] = "fringe";
  j["depth"] = depth;
  j["truncation"] = has_truncated;
  return j;
}

}  // namespace lwc
