#include <cmath>

#include <gtest/gtest.h>

#include "lwc/generators.hpp"
#include "lwc/ising.hpp"

using namespace lwc;

namespace {

RootedTree random_tree(std::size_t n, Rng& rng) {
  std::vector<Vertex> parent(n, kNoVertex);
  for (Vertex v = 1; v < n; ++v) parent[v] = rng.index(v);
  return RootedTree(std::move(parent));
}

// Oracle: plain exponentials, no Gray code, no shifting; small n only.
double naive_logZ(const Graph& g, double beta, double B) {
  double z = 0.0;
  const std::size_t n = g.n();
  for (std::uint64_t mask = 0; mask < (1u << n); ++mask) {
    double e = 0.0;
    for (Vertex u = 0; u < n; ++u) {
      int su = (mask >> u & 1) ? 1 : -1;
      e += B * su;
      for (Vertex w : g.neighbors(u)) {
        int sw = (mask >> w & 1) ? 1 : -1;
        if (w > u) e += beta * su * sw;
        if (w == u) e += 0.5 * beta;  // loop listed twice
      }
    }
    z += std::exp(e);
  }
  return std::log(z);
}

Graph path_graph(std::size_t n) {
  Graph g(n);
  for (Vertex v = 0; v + 1 < n; ++v) g.add_edge(v, v + 1);
  g.finalize();
  return g;
}

// Scalar fixed point h = B + 2 E(beta, h) by bisection.
double regular_fixed_point(double beta, double B, int k) {
  double lo = B, hi = B + k * beta + 1.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (B + (k - 1) * ising_E(beta, mid) > mid ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(ExactGibbs, Examples) {
  Rng rng(1);
  auto g = erdos_renyi(10, 3.0, rng);
  for (double B : {0.0, 0.4, 1.3}) {
    auto s = exact_gibbs(g, {0.0, B, {}});
    EXPECT_NEAR(s.phi, std::log(2 * std::cosh(B)), 1e-12);
  }
  Graph edge(2, {{0, 1}});
  const double beta = 0.7;
  auto s = exact_gibbs(edge, {beta, 0.0, {}}, {}, {{0, 1}});
  EXPECT_NEAR(s.logZ, std::log(2 * std::exp(beta) + 2 * std::exp(-beta)), 1e-12);
  EXPECT_NEAR(s.pair_correlations[0], std::tanh(beta), 1e-12);
  auto big = exact_gibbs(path_graph(6), {0.5, 10.0, {}});
  for (double m : big.magnetization) EXPECT_NEAR(m, 1.0, 1e-6);
  EXPECT_THROW(exact_gibbs(Graph(23), {0.1, 0.0, {}}), InvalidInput);
  EXPECT_THROW(exact_gibbs(edge, {-1.0, 0.0, {}}), InvalidInput);
  EXPECT_THROW(exact_gibbs(edge, {0.1, 0.0, {}}, {5}), InvalidInput);
}

TEST(ExactGibbs, AgreesWithNaiveSum) {
  Rng rng(2);
  for (int rep = 0; rep < 30; ++rep) {
    Graph g(8);
    for (int e = 0; e < 10; ++e) g.add_edge(rng.index(8), rng.index(8));
    g.finalize();
    const double beta = rng.uniform(), B = rng.uniform() - 0.5;
    EXPECT_NEAR(exact_gibbs(g, {beta, B, {}}).logZ, naive_logZ(g, beta, B), 1e-10);
  }
}

TEST(ExactGibbs, LargeBetaDoesNotOverflow) {
  Graph g(12);
  for (Vertex u = 0; u < 12; ++u)
    for (Vertex v = u + 1; v < 12; ++v) g.add_edge(u, v);
  g.finalize();
  auto s = exact_gibbs(g, {200.0, 0.0, {}});
  EXPECT_TRUE(std::isfinite(s.logZ));
  EXPECT_NEAR(s.logZ, 200.0 * 66 + std::log(2.0), 1e-9);
}

TEST(ExactGibbs, PlusBoundary) {
  auto s = exact_gibbs(path_graph(5), {0.8, 0.0, {}}, {0});
  EXPECT_DOUBLE_EQ(s.magnetization[0], 1.0);
  for (Vertex v = 1; v < 5; ++v) EXPECT_NEAR(s.magnetization[v], std::pow(std::tanh(0.8), v), 1e-12);
  EXPECT_TRUE(s.plus_boundary);
}

TEST(ExactGibbs, MagnetizationIsFieldDerivative) {
  Rng rng(3);
  auto g = erdos_renyi(10, 3.0, rng);
  const double beta = 0.4, B = 0.3, d = 1e-4;
  const double dphi = (exact_gibbs(g, {beta, B + d, {}}).phi - exact_gibbs(g, {beta, B - d, {}}).phi) / (2 * d);
  auto m = exact_gibbs(g, {beta, B, {}}).magnetization;
  double mean = 0.0;
  for (double x : m) mean += x / m.size();
  EXPECT_NEAR(dphi, mean, 1e-6);
}

TEST(TreeFields, Examples) {
  RootedTree t({kNoVertex, 0, 0, 1});
  auto z = tree_local_fields(t, {0.0, 0.6, {}});
  for (double h : z.full) EXPECT_DOUBLE_EQ(h, 0.6);
  auto o = tree_local_fields(t, {0.9, 0.0, {}});
  for (double m : o.magnetization) EXPECT_DOUBLE_EQ(m, 0.0);
  RootedTree cherry({kNoVertex, 0, 0});
  auto c = tree_local_fields(cherry, {1.0, 0.5, {}});
  EXPECT_NEAR(c.subtree[0], 0.5 + 2 * ising_E(1.0, 0.5), 1e-15);
  EXPECT_NEAR(c.root_magnetization, exact_gibbs(cherry.as_graph().graph, {1.0, 0.5, {}}).magnetization[0], 1e-12);
}

TEST(TreeFields, MatchEnumerationOnRandomTrees) {
  Rng rng(4);
  double worst = 0.0, prune = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    auto t = random_tree(1 + rng.index(15), rng);
    IsingParams p{1.5 * rng.uniform(), rng.uniform(), {}};
    auto f = tree_local_fields(t, p);
    auto e = exact_gibbs(t.as_graph().graph, p);
    for (Vertex v = 0; v < t.n(); ++v) worst = std::max(worst, std::abs(f.magnetization[v] - e.magnetization[v]));
    prune = std::max(prune, pruning_check(t, p));
  }
  EXPECT_LE(worst, 1e-10);
  EXPECT_LE(prune, 1e-10);
}

TEST(Pruning, Examples) {
  EXPECT_LE(pruning_check(RootedTree({kNoVertex, 0, 0, 0}), {0.7, 0.3, {}}), 1e-14);
  EXPECT_LE(pruning_check(RootedTree({kNoVertex, 0, 0, 1, 1, 2, 2}), {0.7, 0.3, {}}), 1e-10);
  EXPECT_LE(pruning_check(RootedTree({kNoVertex, 0, 1, 2}), {0.7, 0.3, {}}), 1e-10);
  // per-vertex fields are carried into the subtrees
  IsingParams p{0.5, 0.0, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7}};
  EXPECT_LE(pruning_check(RootedTree({kNoVertex, 0, 0, 1, 1, 2, 2}), p), 1e-10);
}

TEST(Griffiths, Grids) {
  Graph tri(3, {{0, 1}, {1, 2}, {2, 0}});
  auto a = griffiths_check(tri, {0.0, 0.3, 0.6}, {0.2});
  EXPECT_TRUE(a.violations.empty());
  auto b = griffiths_check(path_graph(4), {0.4}, {0.0, 0.5, 1.0});
  EXPECT_TRUE(b.violations.empty());
  EXPECT_GT(b.checks, 0u);
  auto s = exact_gibbs(path_graph(4), {0.0, 0.6, {}}, {}, {{0, 1}, {0, 3}, {1, 2}});
  for (double c : s.pair_correlations) EXPECT_NEAR(c, std::pow(std::tanh(0.6), 2), 1e-12);
  EXPECT_THROW(griffiths_check(tri, {0.1}, {-1.0}), InvalidInput);
}

TEST(IsingRde, Collapses) {
  Rng rng(5);
  IsingRdeOptions opt;
  opt.pool_size = 1000;
  auto zero = ising_rde_solve(DegreePmf::poisson(3.0), 0.0, 0.3, opt, rng);
  for (double y : zero.pool) EXPECT_DOUBLE_EQ(y, 0.3);
  auto match = ising_rde_solve(DegreePmf::point(1), 0.8, 0.3, opt, rng);
  for (double y : match.pool) EXPECT_DOUBLE_EQ(y, 0.3);
}

TEST(IsingRde, RegularFixedPoint) {
  Rng rng(6);
  IsingRdeOptions opt;
  opt.pool_size = 1000;
  opt.tolerance = 1e-10;
  auto pool = ising_rde_solve(DegreePmf::point(3), 0.2, 0.1, opt, rng);
  double mean = 0.0;
  for (double y : pool.pool) mean += y / pool.pool.size();
  EXPECT_NEAR(mean, regular_fixed_point(0.2, 0.1, 3), 1e-4);
}

TEST(IsingRde, MonotoneStartsAgree) {
  Rng rng(7);
  IsingRdeOptions opt;
  opt.pool_size = 50000;
  auto m = ising_rde_monotone(DegreePmf::poisson(2.0), 0.5, 0.2, opt, rng);
  EXPECT_LE(m.kolmogorov, 0.01);
  auto d = ising_rde_monotone(DegreePmf::point(3), 0.2, 0.1, opt, rng);
  EXPECT_LE(d.kolmogorov, 0.01);
}

TEST(FreeEnergy, Collapses) {
  Rng rng(8);
  IsingRdeOptions opt;
  opt.pool_size = 1000;
  for (double B : {0.0, 0.3, 2.0}) {
    auto pool = ising_rde_solve(DegreePmf::poisson(2.0), 0.0, B, opt, rng);
    auto f = free_energy_limit(DegreePmf::poisson(2.0), 0.0, B, pool, 1000, rng);
    EXPECT_NEAR(f.mean, std::log(2 * std::cosh(B)), 1e-12);
  }
  IsingPool raw;
  raw.pool = {0.1};
  EXPECT_THROW(free_energy_limit(DegreePmf::point(3), 0.2, 0.1, raw, 100, rng), InvalidInput);
}

TEST(FreeEnergy, RegularGraphTrend) {
  Rng rng(9);
  const double beta = 0.2, B = 0.1;
  IsingRdeOptions opt;
  opt.pool_size = 10000;
  auto pool = ising_rde_solve(DegreePmf::point(3), beta, B, opt, rng);
  auto phi = free_energy_limit(DegreePmf::point(3), beta, B, pool, 100000, rng);
  std::vector<double> gap;
  for (std::size_t n : {10, 16}) {
    double acc = 0.0;
    for (int s = 0; s < 50; ++s) {
      Rng local = rng.split(1000 * n + s);
      auto g = configuration_model(DegreePmf::point(3), n, local);
      acc += exact_gibbs(g, {beta, B, {}}).phi / 50;
    }
    gap.push_back(std::abs(acc - phi.mean));
  }
  EXPECT_LT(gap[1], gap[0]);
}
