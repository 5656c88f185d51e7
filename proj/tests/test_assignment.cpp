#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "lwc/assignment.hpp"

using namespace lwc;

namespace {

// Oracle: all n! permutations; ties resolved by the first (lexicographic) one.
std::pair<double, std::vector<std::size_t>> brute_force(const CostMatrix& m) {
  std::vector<std::size_t> perm(m.n());
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  std::vector<std::size_t> arg;
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < m.n(); ++i) c += m(i, perm[i]);
    if (c < best) {
      best = c;
      arg = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {best, arg};
}

CostMatrix random_matrix(std::size_t n, Rng& rng) {
  CostMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.exponential(1.0);
  return m;
}

}  // namespace

TEST(Assignment, Examples) {
  CostMatrix one(1, {4.5});
  EXPECT_DOUBLE_EQ(optimal_assignment(one).total_cost, 4.5);
  CostMatrix diag(3, {0, 5, 5, 5, 0, 5, 5, 5, 0});
  auto s = optimal_assignment(diag);
  EXPECT_EQ(s.perm, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_THROW(optimal_assignment(CostMatrix(2, {0, NAN, 1, 1})), InvalidInput);
  EXPECT_THROW(optimal_assignment(CostMatrix(0)), InvalidInput);
}

TEST(Assignment, MatchesBruteForce) {
  Rng rng(1);
  for (int rep = 0; rep < 50; ++rep) {
    auto m = random_matrix(7, rng);
    auto s = optimal_assignment(m);
    auto [best, arg] = brute_force(m);
    EXPECT_NEAR(s.total_cost, best, 1e-12);
    EXPECT_EQ(s.perm, arg);
    EXPECT_LE(dual_residual(m, s), 1e-9);
  }
  for (std::size_t n = 1; n <= 8; ++n) {
    auto m = random_matrix(n, rng);
    EXPECT_NEAR(optimal_assignment(m).total_cost, brute_force(m).first, 1e-12);
  }
}

TEST(Assignment, IntegerTiesAreLexicographic) {
  Rng rng(2);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + rng.index(5);
    CostMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = double(rng.index(3));
    auto s = optimal_assignment(m);
    auto [best, arg] = brute_force(m);
    EXPECT_DOUBLE_EQ(s.total_cost, best);
    EXPECT_EQ(s.perm, arg);
  }
  CostMatrix flat(4);
  EXPECT_EQ(optimal_assignment(flat).perm, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(Assignment, PermutationAndCostConsistent) {
  Rng rng(3);
  auto m = random_matrix(60, rng);
  auto s = optimal_assignment(m);
  std::vector<std::size_t> sorted = s.perm;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], i);
  double c = 0.0;
  for (std::size_t i = 0; i < 60; ++i) c += m(i, s.perm[i]);
  EXPECT_NEAR(c, s.total_cost, 1e-9);
  EXPECT_LE(dual_residual(m, s), 1e-9);
}

TEST(RandomAssignment, SmallN) {
  Rng rng(4);
  auto one = random_assignment_experiment(1, 10000, rng);
  EXPECT_NEAR(one.mean, 1.0, 3 * one.se);
  // n = 2 against an independent brute-force pipeline
  auto two = random_assignment_experiment(2, 100000, rng);
  Rng other(99);
  std::vector<double> xs;
  for (int i = 0; i < 100000; ++i) {
    double a = other.exponential(0.5), b = other.exponential(0.5), c = other.exponential(0.5), d = other.exponential(0.5);
    xs.push_back(std::min(a + d, b + c) / 2);
  }
  auto bf = stats::mean_se(xs);
  EXPECT_NEAR(two.mean, bf.mean, 3 * std::hypot(two.se, bf.se));
  // finite-n value sum_{k<=n} 1/k^2 for n = 2 is 1.25
  EXPECT_NEAR(two.mean, 1.25, 3 * two.se);
}

TEST(RandomAssignment, IncreasesTowardZeta2) {
  Rng rng(5);
  auto a10 = random_assignment_experiment(10, 400, rng);
  auto a50 = random_assignment_experiment(50, 100, rng);
  EXPECT_LT(a10.mean, a50.mean);
  EXPECT_LT(a50.mean, kZeta2 + 3 * a50.se);
  auto unit = random_assignment_experiment(10, 400, rng, true);
  EXPECT_NEAR(unit.mean, a10.mean, 3 * std::hypot(unit.se, a10.se));
}

TEST(Logistic, DensityAndCdf) {
  EXPECT_DOUBLE_EQ(logistic_density(0.0), 0.25);
  EXPECT_NEAR(logistic_density(1.3), std::pow(std::exp(0.65) + std::exp(-0.65), -2), 1e-15);
  EXPECT_DOUBLE_EQ(logistic_cdf(0.0), 0.5);
}

TEST(Logistic, RdePoolIsLogistic) {
  Rng rng(6);
  LogisticRdeOptions opt;
  auto pool = logistic_rde_solve(opt, rng);
  EXPECT_TRUE(pool.converged);
  EXPECT_LE(stats::ks_distance(pool.pool, logistic_cdf), 0.02);
  EXPECT_NEAR(stats::quantile(pool.pool, 0.5), 0.0, 0.02);
  auto ms = stats::mean_se(pool.pool);
  EXPECT_LE(std::abs(ms.mean), 3 * ms.se + 0.01);
  EXPECT_GT(pool.max_margin, 0.0);
  auto z = zeta2_integral(pool, 1000000, rng);
  // the pool itself carries ~0.013 sampling error at this size
  EXPECT_NEAR(z.mean, kZeta2, 0.04);
}

TEST(Logistic, CutoffDiagnostic) {
  Rng rng(7);
  LogisticRdeOptions opt;
  opt.pool_size = 1000;
  opt.points = 2;
  EXPECT_THROW(logistic_rde_solve(opt, rng), NotConverged);
}

TEST(Zeta2, AnalyticAndDegenerate) {
  EXPECT_NEAR(zeta2_integral_analytic(), kZeta2, 1e-4);
  Rng rng(8);
  EXPECT_DOUBLE_EQ(zeta2_integral(std::vector<double>(100, 0.0), 1000, rng).mean, 0.0);
}

TEST(Greedy, PwitRootEdge) {
  Rng rng(9);
  std::vector<double> w;
  for (int i = 0; i < 10000; ++i) {
    auto t = pwit_sample(2, 30.0, rng);
    w.push_back(pwit_greedy_matching(t).root_weight);
  }
  auto ms = stats::mean_se(w);
  EXPECT_NEAR(ms.mean, 1.0, 0.03);
  EXPECT_GT(kZeta2 - ms.mean, 0.5);
  // depth one: the root takes its lightest edge
  auto star = pwit_sample(1, 30.0, rng);
  double lightest = INFINITY;
  for (Vertex c : star.tree.children(0)) lightest = std::min(lightest, star.weight[c]);
  EXPECT_DOUBLE_EQ(pwit_greedy_matching(star).root_weight, lightest);
}
