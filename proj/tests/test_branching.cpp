#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "lwc/branching.hpp"
#include "lwc/canonical.hpp"
#include "lwc/generators.hpp"
#include "lwc/measure.hpp"
#include "lwc/stats.hpp"

using namespace lwc;

TEST(Yule, Examples) {
  Rng rng(1);
  EXPECT_EQ(yule_sample(Horizon::fixed(0.0), rng).size(), 1u);
  int ones = 0;
  const int N = 100000;
  for (int i = 0; i < N; ++i) ones += yule_sample(Horizon::exponential(1.0), rng, 50000000).size() == 1;
  EXPECT_NEAR(ones / double(N), 0.5, 0.005);
}

TEST(Yule, MartingaleLimitIsExponential) {
  Rng rng(2);
  std::vector<double> w;
  for (int i = 0; i < 10000; ++i) w.push_back(std::exp(-6.0) * yule_sample(Horizon::fixed(6.0), rng).size());
  EXPECT_NEAR(stats::mean_se(w).mean, 1.0, 0.05);
  EXPECT_LE(stats::ks_distance(w, [](double x) { return 1.0 - std::exp(-x); }), 0.02);
}

TEST(Yule, BirthTimesOrdered) {
  Rng rng(3);
  auto y = yule_sample(Horizon::fixed(4.0), rng);
  ASSERT_TRUE(y.tree.has_birth_times());
  for (double b : y.tree.birth_times()) EXPECT_LE(b, 4.0);
  EXPECT_THROW(yule_sample(Horizon::fixed(30.0), rng, 1000), CapExceeded);
}

TEST(Ctbp, ConstantMatchesYule) {
  Rng rng(4);
  std::vector<double> a, b;
  for (int i = 0; i < 20000; ++i) {
    a.push_back(double(ctbp_sample(AttachmentFn::constant(), Horizon::fixed(3.0), rng).size()));
    b.push_back(double(yule_sample(Horizon::fixed(3.0), rng).size()));
  }
  EXPECT_LE(stats::ks_two_sample(a, b), 0.02);
  EXPECT_EQ(ctbp_sample(AttachmentFn::affine(1.0), Horizon::fixed(0.0), rng).size(), 1u);
}

TEST(Ctbp, AffineMeans) {
  // f(k) = k + 2: root offspring mean a(e^t - 1) with a = 2, total
  // population mean 1/3 + (2/3) e^{3t}.
  Rng rng(5);
  const double t = 2.0;
  std::vector<double> root, total;
  for (int i = 0; i < 4000; ++i) {
    auto s = ctbp_sample(AttachmentFn::affine(1.0), Horizon::fixed(t), rng);
    root.push_back(double(s.tree.child_count(0)) + 1.0);
    total.push_back(double(s.size()));
  }
  auto r = stats::mean_se(root), n = stats::mean_se(total);
  EXPECT_NEAR(r.mean, 2.0 * (std::exp(t) - 1.0) + 1.0, 3 * r.se);
  EXPECT_NEAR(n.mean, 1.0 / 3 + 2.0 / 3 * std::exp(3 * t), 3 * n.se);
}

TEST(Ctbp, ExplosionGuard) {
  Rng rng(6);
  auto fast = AttachmentFn::general([](std::size_t k) { return std::pow(double(k + 1), 2.0); });
  EXPECT_THROW(ctbp_sample(fast, Horizon::fixed(5.0), rng, 10000), CapExceeded);
}

TEST(AthreyaKarlin, StoppedProcessesMatchSequentialGrowth) {
  Rng rng(7);
  auto shape_law = [&](auto&& make) {
    CodeMeasure m;
    for (int i = 0; i < 100000; ++i) m.add(tree_code(make()));
    return m;
  };
  auto yule = shape_law([&] { return yule_until_population(5, rng).tree; });
  auto rrt = shape_law([&] { return recursive_tree(5, AttachmentFn::constant(), rng); });
  EXPECT_EQ(rrt.support_size(), 9u);  // unordered rooted trees on 5 vertices
  EXPECT_LE(tv_distance(yule, rrt), 0.02);

  auto f = AttachmentFn::affine(1.0);
  auto ct = shape_law([&] { return ctbp_sample(f, Horizon::fixed(INFINITY), rng, 100, 4).tree; });
  auto pa = shape_law([&] { return recursive_tree(4, f, rng); });
  EXPECT_LE(tv_distance(ct, pa), 0.02);
}

TEST(Malthusian, ClosedForms) {
  EXPECT_NEAR(malthusian_rate(AttachmentFn::constant()).lambda, 1.0, 1e-12);
  EXPECT_NEAR(malthusian_rate(AttachmentFn::affine(1.0)).lambda, 3.0, 1e-12);
  EXPECT_NEAR(malthusian_rate(AttachmentFn::affine(0.0)).lambda, 2.0, 1e-12);
  EXPECT_LE(malthusian_rate(AttachmentFn::affine(1.0)).residual, 1e-10);
  EXPECT_NEAR(malthusian_rate(AttachmentFn::affine(1.0), 0.5).lambda, 2.0, 1e-12);
}

TEST(Malthusian, GeneralFunctionBySeries) {
  // affine written as a general function must recover the closed form
  auto g = AttachmentFn::general([](std::size_t k) { return double(k) + 2.0; });
  auto r = malthusian_rate(g);
  EXPECT_NEAR(r.lambda, 3.0, 1e-6);
  EXPECT_LE(r.residual, 1e-8);
  auto sub = AttachmentFn::general([](std::size_t k) { return std::sqrt(double(k) + 1.0); });
  auto s = malthusian_rate(sub);
  EXPECT_NEAR(birth_laplace(sub, s.lambda), 1.0, 1e-6);
}

TEST(SizeBiased, Examples) {
  auto d = size_biased(DegreePmf::point(4));
  EXPECT_DOUBLE_EQ(d[3], 1.0);
  auto p = DegreePmf::poisson(2.0, 40);
  auto q = size_biased(p);
  for (std::size_t k = 0; k + 1 < p.probs().size(); ++k) EXPECT_NEAR(q[k], p[k], 1e-10);
  auto two = size_biased(DegreePmf({0.0, 0.5, 0.0, 0.5}));
  EXPECT_NEAR(two[0], 0.25, 1e-15);
  EXPECT_NEAR(two[2], 0.75, 1e-15);
  EXPECT_THROW(size_biased(DegreePmf::point(0)), InvalidInput);
  // Poisson is the tested family fixed by size-biasing; a two-point law is not.
  EXPECT_GT(std::abs(size_biased(two)[1] - two[1]), 0.1);
}

TEST(UnimodularBp, Examples) {
  Rng rng(8);
  EXPECT_EQ(unimodular_bp_sample(DegreePmf::point(0), 5, rng).n(), 1u);
  auto t = unimodular_bp_sample(DegreePmf::point(4), 3, rng);
  EXPECT_EQ(t.child_count(0), 4u);
  for (Vertex v = 1; v < t.n(); ++v) {
    if (t.depth(v) < 3) {
      EXPECT_EQ(t.child_count(v), 3u);
    }
  }
  EXPECT_EQ(t.n(), 1u + 4 + 12 + 36);
  std::vector<std::vector<double>> gens(3);
  for (int i = 0; i < 10000; ++i) {
    auto s = unimodular_bp_sample(DegreePmf::poisson(2.0, 40), 3, rng);
    std::vector<double> c(4, 0.0);
    for (Vertex v = 0; v < s.n(); ++v) c[s.depth(v)] += 1;
    for (int g = 0; g < 3; ++g) gens[g].push_back(c[g + 1]);
  }
  for (int g = 0; g < 3; ++g) {
    auto ms = stats::mean_se(gens[g]);
    EXPECT_NEAR(ms.mean, std::pow(2.0, g + 1), 3 * ms.se);
  }
}

TEST(Percolate, Examples) {
  Rng rng(9);
  RootedTree edge({kNoVertex, 0});
  int kept = 0;
  for (int i = 0; i < 20000; ++i) kept += percolate(edge, 0.5, rng).n() == 2;
  EXPECT_NEAR(kept / 2e4, 0.5, 0.015);
  RootedTree path({kNoVertex, 0, 1});
  kept = 0;
  for (int i = 0; i < 20000; ++i) kept += percolate(path, 0.6, rng).n() == 3;
  EXPECT_NEAR(kept / 2e4, 0.36, 0.015);
  EXPECT_THROW(percolate(path, 1.5, rng), InvalidInput);
}

TEST(Percolate, CommutesWithFringe) {
  RootedTree t({kNoVertex, 0, 0, 1, 1, 3, 2, 5});
  const Vertex v = 1;
  const double c = 0.6;
  Rng rng(10);
  CodeMeasure after, before;
  auto marked = t;
  std::vector<int> ids(t.n());
  for (Vertex u = 0; u < t.n(); ++u) ids[u] = int(u);
  marked.set_marks(ids);
  int survived = 0;
  while (survived < 20000) {
    auto p = percolate(marked, c, rng);
    for (Vertex u = 0; u < p.n(); ++u)
      if (p.marks()[u] == int(v)) {
        after.add(tree_code(p.subtree(u)));
        ++survived;
      }
  }
  for (int i = 0; i < 20000; ++i) before.add(tree_code(percolate(t.subtree(v), c, rng)));
  EXPECT_LE(tv_distance(after, before), 0.03);
}

TEST(Pwit, Examples) {
  Rng rng(11);
  EXPECT_EQ(pwit_sample(0, 5.0, rng).tree.n(), 1u);
  std::vector<double> first, count;
  for (int i = 0; i < 10000; ++i) {
    auto w = pwit_sample(1, 30.0, rng);
    ASSERT_GE(w.tree.n(), 2u);
    first.push_back(w.weight[1]);
    auto c = pwit_sample(1, 3.0, rng);
    count.push_back(double(c.tree.n() - 1));
  }
  EXPECT_NEAR(stats::mean_se(first).mean, 1.0, 0.03);
  auto cs = stats::mean_se(count);
  EXPECT_NEAR(cs.mean, 3.0, 3 * cs.se);
}
