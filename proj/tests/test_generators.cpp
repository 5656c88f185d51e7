#include <cmath>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "lwc/canonical.hpp"
#include "lwc/generators.hpp"
#include "lwc/io.hpp"
#include "lwc/measure.hpp"
#include "lwc/stats.hpp"

using namespace lwc;

namespace {

// Oracle: exact law of the recursive tree on 4 vertices, by enumerating the
// 6 attachment histories, with f evaluated on child counts.
std::map<std::vector<Vertex>, double> exact_recursive_law(const AttachmentFn& f) {
  std::map<std::vector<Vertex>, double> law;
  for (Vertex p2 = 0; p2 < 2; ++p2)
    for (Vertex p3 = 0; p3 < 3; ++p3) {
      std::vector<Vertex> par{kNoVertex, 0, p2, p3};
      double prob = 1.0;
      for (Vertex k = 2; k < 4; ++k) {
        std::vector<std::size_t> kids(k, 0);
        for (Vertex v = 1; v < k; ++v) ++kids[par[v]];
        double tot = 0.0;
        for (Vertex v = 0; v < k; ++v) tot += f(kids[v]);
        prob *= f(kids[par[k]]) / tot;
      }
      law[par] = prob;
    }
  return law;
}

}  // namespace

TEST(DegreePmf, Basics) {
  auto p = DegreePmf::poisson(2.0);
  EXPECT_NEAR(p[0], std::exp(-2.0), 1e-15);
  EXPECT_NEAR(p.mean(), 2.0, 1e-10);
  EXPECT_THROW(DegreePmf({0.5, 0.6}), InvalidInput);
  EXPECT_THROW(DegreePmf({-0.5, 1.5}), InvalidInput);
  EXPECT_DOUBLE_EQ(DegreePmf::point(3).mean(), 3.0);
}

TEST(ErdosRenyi, Examples) {
  Rng rng(1);
  EXPECT_EQ(erdos_renyi(2, 2.0, rng).edge_count(), 1u);
  EXPECT_EQ(erdos_renyi(3, 0.0, rng).edge_count(), 0u);
  EXPECT_THROW(erdos_renyi(3, 4.0, rng), InvalidInput);
  auto g = erdos_renyi(100000, 2.0, rng);
  EXPECT_TRUE(g.is_simple());
  IntMeasure deg;
  for (Vertex v = 0; v < g.n(); ++v) deg.add(static_cast<std::int64_t>(g.degree(v)));
  IntMeasure target;
  auto p = DegreePmf::poisson(2.0, 40);
  for (std::size_t k = 0; k < p.probs().size(); ++k) target.add(static_cast<std::int64_t>(k), p[k]);
  EXPECT_LE(tv_distance(deg, target), 0.01);
  EXPECT_NEAR(deg.probability(0), std::exp(-2.0), 0.005);
}

TEST(ErdosRenyi, EdgeCountMean) {
  Rng rng(2);
  std::vector<double> counts;
  for (int r = 0; r < 1000; ++r) {
    Rng local = rng.split(r);
    counts.push_back(static_cast<double>(erdos_renyi(1000, 2.0, local).edge_count()));
  }
  auto ms = stats::mean_se(counts);
  EXPECT_NEAR(ms.mean, 2.0 * 999 / 2, 3 * ms.se);
}

TEST(ConfigurationModel, Examples) {
  Rng rng(3);
  EXPECT_EQ(configuration_model(std::vector<std::size_t>{1, 1}, rng).multiplicity(0, 1), 1u);
  auto loop = configuration_model(std::vector<std::size_t>{2}, rng);
  EXPECT_EQ(loop.multiplicity(0, 0), 1u);
  EXPECT_EQ(loop.degree(0), 2u);
  int hit = 0;
  for (int i = 0; i < 10000; ++i) hit += configuration_model(std::vector<std::size_t>{1, 1, 1, 1}, rng).multiplicity(0, 1);
  EXPECT_NEAR(hit / 1e4, 1.0 / 3.0, 0.02);
  EXPECT_THROW(configuration_model(std::vector<std::size_t>{1, 2}, rng), InvalidInput);
}

TEST(ConfigurationModel, ConservesDegrees) {
  Rng rng(4);
  for (int rep = 0; rep < 50; ++rep) {
    auto d = sample_degrees(DegreePmf::poisson(3.0), 500, rng);
    auto g = configuration_model(d, rng);
    for (Vertex v = 0; v < g.n(); ++v) EXPECT_EQ(g.degree(v), d[v]);
  }
  auto d = sample_degrees(DegreePmf::point(3), 13, rng);
  EXPECT_EQ(d.back(), 4u);  // parity fix on the last vertex
}

TEST(RecursiveTree, Examples) {
  Rng rng(5);
  EXPECT_EQ(recursive_tree(2, AttachmentFn::constant(), rng).parent(1), 0u);
  int root = 0;
  for (int i = 0; i < 20000; ++i) root += recursive_tree(3, AttachmentFn::constant(), rng).parent(2) == 0;
  EXPECT_NEAR(root / 2e4, 0.5, 0.015);
  root = 0;
  for (int i = 0; i < 20000; ++i) root += recursive_tree(3, AttachmentFn::affine(1.0), rng).parent(2) == 0;
  EXPECT_NEAR(root / 2e4, 0.6, 0.015);
}

TEST(RecursiveTree, ExactLawAtFourForAllKinds) {
  std::vector<AttachmentFn> fs{AttachmentFn::constant(), AttachmentFn::affine(0.5),
                               AttachmentFn::general([](std::size_t k) { return 1.0 + std::sqrt(double(k)); })};
  Rng rng(6);
  for (const auto& f : fs) {
    auto law = exact_recursive_law(f);
    std::map<std::vector<Vertex>, double> freq;
    const int N = 60000;
    for (int i = 0; i < N; ++i) freq[recursive_tree(4, f, rng).parents()] += 1.0 / N;
    for (const auto& [par, p] : law) EXPECT_NEAR(freq[par], p, 0.01);
  }
}

TEST(AttributeTree, SingleTypeMatchesLinearAttachment) {
  AttributeKernel k{{1.0}, {{1.0}}, 1.0};
  auto law = exact_recursive_law(AttachmentFn::affine(0.0));  // deg = children + 1
  Rng rng(7);
  std::map<std::vector<Vertex>, double> freq;
  const int N = 60000;
  for (int i = 0; i < N; ++i) freq[attribute_tree(4, k, rng).parents()] += 1.0 / N;
  for (const auto& [par, p] : law) EXPECT_NEAR(freq[par], p, 0.01);
}

TEST(AttributeTree, UniformKernelIsUniformRecursive) {
  AttributeKernel k{{0.5, 0.5}, {{1.0, 1.0}, {1.0, 1.0}}, 0.0};
  auto law = exact_recursive_law(AttachmentFn::constant());
  Rng rng(8);
  std::map<std::vector<Vertex>, double> freq;
  const int N = 60000;
  for (int i = 0; i < N; ++i) freq[attribute_tree(4, k, rng).parents()] += 1.0 / N;
  for (const auto& [par, p] : law) EXPECT_NEAR(freq[par], p, 0.01);
}

TEST(AttributeTree, TwoTypeSetting) {
  AttributeKernel k{{0.35, 0.65}, {{0.75, 0.25}, {0.25, 0.75}}, 1.0};
  Rng rng(9);
  auto t = attribute_tree(30000, k, rng);
  ASSERT_TRUE(t.has_marks());
  std::size_t red = std::count(t.marks().begin(), t.marks().end(), 0);
  EXPECT_NEAR(red / 30000.0, 0.35, 0.02);
  AttributeKernel bad{{0.5, 0.5}, {{1.0, 0.0}, {1.0, 1.0}}, 1.0};
  EXPECT_THROW(attribute_tree(10, bad, rng), InvalidInput);
}

TEST(CoevolvingTree, Regimes) {
  Rng rng(10);
  auto t0 = coevolving_tree(4, StepPmf::point(0), rng);
  EXPECT_EQ(t0.parent(1), 0u);
  auto star = coevolving_tree(200, StepPmf::point(1000), rng);
  EXPECT_EQ(star.child_count(0), 199u);
  // step 0 is the uniform recursive tree
  auto law = exact_recursive_law(AttachmentFn::constant());
  std::map<std::vector<Vertex>, double> freq;
  const int N = 60000;
  for (int i = 0; i < N; ++i) freq[coevolving_tree(4, StepPmf::point(0), rng).parents()] += 1.0 / N;
  for (const auto& [par, p] : law) EXPECT_NEAR(freq[par], p, 0.01);
  EXPECT_NEAR(StepPmf::geometric(0.35).mean(), 0.65 / 0.35, 1e-12);
}

TEST(Generators, SeedDeterminism) {
  auto run = [](std::uint64_t seed) {
    Rng rng(seed);
    std::ostringstream os;
    io::write_edge_list(os, erdos_renyi(500, 2.0, rng));
    io::write_edge_list(os, configuration_model(DegreePmf::poisson(2.0), 300, rng));
    io::write_tree(os, recursive_tree(300, AttachmentFn::affine(1.0), rng));
    io::write_tree(os, coevolving_tree(300, StepPmf::geometric(0.5), rng));
    return os.str();
  };
  EXPECT_EQ(run(42), run(42));
  EXPECT_NE(run(42), run(43));
}
