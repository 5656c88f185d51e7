#include <cmath>

#include <gtest/gtest.h>

#include "lwc/branching.hpp"
#include "lwc/generators.hpp"
#include "lwc/pagerank.hpp"
#include "lwc/stats.hpp"

using namespace lwc;

TEST(PageRankLinear, Examples) {
  const double c = 0.4;
  auto one = pagerank_linear(DiGraph(1), c);
  EXPECT_NEAR(one.raw[0], 1 - c, 1e-14);
  EXPECT_NEAR(one.normalized[0], 1 - c, 1e-14);
  DiGraph two(2);
  two.add_edge(1, 0);
  EXPECT_NEAR(pagerank_linear(two, c).normalized[0], (1 - c) * (1 + c), 1e-12);
  DiGraph hub(6);
  for (Vertex v = 1; v < 6; ++v) hub.add_edge(v, 0);
  EXPECT_NEAR(pagerank_linear(hub, c).normalized[0], (1 - c) * (1 + 5 * c), 1e-12);
  EXPECT_THROW(pagerank_linear(hub, 1.0), InvalidInput);
  EXPECT_THROW(pagerank_linear(hub, 0.0), InvalidInput);
}

TEST(PageRankLinear, ResidualAndMass) {
  Rng rng(1);
  for (double c : {0.15, 0.5, 0.85}) {
    auto t = recursive_tree(2000, AttachmentFn::affine(1.0), rng);
    auto s = pagerank_linear(DiGraph::from_tree(t), c);
    EXPECT_LE(s.residual, 1e-10);
    double mass = 0.0;
    for (double r : s.raw) {
      EXPECT_GE(r, (1 - c) / 2000 - 1e-18);
      mass += r;
    }
    EXPECT_LT(mass, 1.0);  // the root dangles
  }
  // no dangling vertex: a directed cycle keeps all the mass
  DiGraph cyc(5);
  for (Vertex v = 0; v < 5; ++v) cyc.add_edge(v, (v + 1) % 5);
  double mass = 0.0;
  for (double r : pagerank_linear(cyc, 0.7).raw) mass += r;
  EXPECT_NEAR(mass, 1.0, 1e-12);
}

TEST(PathCounts, Examples) {
  const double c = 0.3;
  DiGraph path(3);
  path.add_edge(1, 0);
  path.add_edge(2, 1);
  auto s = pagerank_path_counts(path, c);
  EXPECT_NEAR(s.normalized[2], 1 - c, 1e-15);
  EXPECT_NEAR(s.normalized[0], (1 - c) * (1 + c + c * c), 1e-15);
  DiGraph bad(3);
  bad.add_edge(0, 1);
  bad.add_edge(0, 2);
  EXPECT_THROW(pagerank_path_counts(bad, c), InvalidInput);
}

TEST(PathCounts, MatchLinearSolve) {
  Rng rng(2);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng.index(1000);
    auto f = rep % 2 ? AttachmentFn::constant() : AttachmentFn::affine(rng.uniform() * 2);
    auto g = DiGraph::from_tree(recursive_tree(n, f, rng));
    const double c = 0.05 + 0.9 * rng.uniform();
    auto a = pagerank_path_counts(g, c), b = pagerank_linear(g, c);
    for (Vertex v = 0; v < n; ++v) worst = std::max(worst, std::abs(a.normalized[v] - b.normalized[v]));
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(LimitRootPageRank, SmallTrees) {
  const double c = 0.5;
  EXPECT_DOUBLE_EQ(root_pagerank_given_tree(RootedTree::point(), c), 1 - c);
  EXPECT_DOUBLE_EQ(root_pagerank_given_tree(RootedTree({kNoVertex, 0}), c), (1 - c) * (1 + c));
  DiGraph two(2);
  two.add_edge(1, 0);
  EXPECT_NEAR(pagerank_linear(two, c).normalized[0], root_pagerank_given_tree(RootedTree({kNoVertex, 0}), c), 1e-12);
}

TEST(LimitRootPageRank, DepthSumIsExpectedClusterSize) {
  Rng rng(3);
  auto t = recursive_tree(30, AttachmentFn::constant(), rng);
  const double c = 0.6;
  std::vector<double> sizes;
  for (int i = 0; i < 40000; ++i) sizes.push_back(double(percolate(t, c, rng).n()));
  auto ms = stats::mean_se(sizes);
  EXPECT_NEAR((1 - c) * ms.mean, root_pagerank_given_tree(t, c), 3 * (1 - c) * ms.se);
}

TEST(LimitRootPageRank, StreamingMatchesStoredTree) {
  // the streaming walk and ctbp_sample with an Exp(lambda) horizon draw the same law
  Rng rng(4);
  const double c = 0.5;
  auto f = AttachmentFn::affine(0.0);
  std::vector<double> a, b;
  for (int i = 0; i < 20000; ++i) {
    a.push_back(limit_root_pagerank_sample(f, c, rng));
    auto t = ctbp_sample(f, Horizon::exponential(malthusian_rate(f).lambda), rng, 50000000);
    b.push_back(root_pagerank_given_tree(t.tree, c));
  }
  EXPECT_LE(stats::ks_two_sample(a, b), 0.02);
}

TEST(LimitRootPageRank, RrtMeanIsOne) {
  Rng rng(5);
  const double c = 0.5;
  std::vector<double> xs;
  for (int i = 0; i < 100000; ++i) xs.push_back(limit_root_pagerank_sample(AttachmentFn::constant(), c, rng));
  auto t = recursive_tree(100000, AttachmentFn::constant(), rng);
  auto s = pagerank_linear(DiGraph::from_tree(t), c);
  double emp = 0.0;
  for (double r : s.normalized) emp += r / s.normalized.size();
  EXPECT_NEAR(stats::mean_se(xs).mean, emp, 0.01);
}

TEST(LimitRootPageRank, KolmogorovAgainstRrt) {
  Rng rng(6);
  const double c = 0.3;
  std::vector<double> xs;
  for (int i = 0; i < 100000; ++i) xs.push_back(limit_root_pagerank_sample(AttachmentFn::constant(), c, rng));
  auto t = recursive_tree(100000, AttachmentFn::constant(), rng);
  auto s = pagerank_linear(DiGraph::from_tree(t), c);
  // both laws have atoms (a leaf scores exactly 1 - c); snap away solver noise
  auto snap = [](std::vector<double> v) {
    for (auto& x : v) x = std::round(x * 1e9) / 1e9;
    return v;
  };
  EXPECT_LE(stats::ks_two_sample(snap(xs), snap(s.normalized)), 0.02);
  int thrown = 0;
  for (int i = 0; i < 100; ++i) try {
      limit_root_pagerank_sample(AttachmentFn::affine(1.0), 0.5, rng, 1);
    } catch (const CapExceeded&) {
      ++thrown;
    }
  EXPECT_GT(thrown, 0);
}

TEST(ExponentTargets, Formulas) {
  auto e = exponent_targets(1.0, 0.5);
  EXPECT_DOUBLE_EQ(e.degree_exponent, 3.0);
  EXPECT_DOUBLE_EQ(e.pagerank_exponent, 1.5);
  auto z = exponent_targets(0.0, 0.5);
  EXPECT_DOUBLE_EQ(z.degree_exponent, 2.0);
  EXPECT_NEAR(z.pagerank_exponent, 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(exponent_targets(0.7, 1e-9).pagerank_exponent, 2.7, 1e-8);
  for (double beta : {-0.5, 0.0, 1.0, 3.0})
    for (double c : {0.1, 0.5, 0.9}) {
      auto t = exponent_targets(beta, c);
      EXPECT_NEAR(t.lambda / t.lambda_c, t.pagerank_exponent, 1e-12);
      auto f = AttachmentFn::affine(beta);
      EXPECT_NEAR(malthusian_rate(f).lambda, t.lambda, 1e-12);
      EXPECT_NEAR(malthusian_rate(f, c).lambda, t.lambda_c, 1e-12);
    }
  EXPECT_THROW(exponent_targets(-1.0, 0.5), InvalidInput);
}
