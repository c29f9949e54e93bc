#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "freeinv/hyper.hpp"
#include "oracles.hpp"

using namespace freeinv;

namespace {

DiscreteKernel random_kernel(std::mt19937_64& rng, int N, int q) {
  DiscreteKernel g(N, q);
  std::normal_distribution<double> val(0.0, 1.0);
  SparseArray::Index idx(static_cast<std::size_t>(q), 1);
  while (true) {
    g.set(idx, val(rng));
    std::size_t p = 0;
    while (p < idx.size() && idx[p] == N) idx[p++] = 1;
    if (p == idx.size()) break;
    ++idx[p];
  }
  return g;
}

}  // namespace

TEST(BlockGraph, Validation) {
  const BlockGraph g({2, 2}, {{2, 0}, {3, 1}});
  EXPECT_TRUE(g.respects());
  EXPECT_TRUE(g.complete());
  EXPECT_FALSE(g.has_singleton());
  EXPECT_EQ(g.blocks().front(), (BlockGraph::Block{0, 2}));
  EXPECT_EQ(g.segment_of(3), 1);
  EXPECT_FALSE(BlockGraph({2, 2}, {{0, 1}}).respects());
  EXPECT_THROW(BlockGraph({2, 2}, {{0, 1}, {1, 2}}), ArgumentError);
  EXPECT_THROW(BlockGraph({2, 2}, {{0, 4}}), ArgumentError);
  EXPECT_THROW(BlockGraph({}, {}), ArgumentError);
  EXPECT_THROW(BlockGraph({2, 0}, {}), ArgumentError);
}

TEST(Graphs, SmallShapes) {
  const std::vector<int> s22{2, 2};
  const auto complete = enumerate_graphs(s22, true);
  ASSERT_EQ(complete.size(), 2u);
  EXPECT_EQ(complete[0].blocks(), (std::vector<BlockGraph::Block>{{0, 2}, {1, 3}}));
  EXPECT_EQ(complete[1].blocks(), (std::vector<BlockGraph::Block>{{0, 3}, {1, 2}}));
  EXPECT_EQ(count_graphs(std::vector<int>{1, 1}, true), 1u);
  EXPECT_EQ(count_graphs(std::vector<int>{2}, true), 0u);
  EXPECT_EQ(count_graphs(std::vector<int>{2}, false), 1u);
  EXPECT_EQ(count_graphs(s22, false), 7u);
  for (const auto& g : enumerate_graphs(std::vector<int>{2, 1, 2}, false)) {
    EXPECT_TRUE(g.respects());
    EXPECT_FALSE(g.has_singleton());
  }
}

TEST(Graphs, MatchPartitionOracle) {
  const std::vector<std::vector<int>> shapes{{1, 1}, {2, 2}, {1, 2, 3}, {2, 2, 2}, {3, 3}, {2, 2, 2, 2}, {1, 1, 1, 1, 1}, {3, 1, 2, 2}};
  for (const auto& s : shapes)
    for (bool complete : {true, false}) EXPECT_EQ(count_graphs(s, complete), oracle::count_graphs(s, complete));
}

TEST(HyperConstant, FrozenValues) {
  EXPECT_EQ(hyper_constant(1, 1), 1u);
  EXPECT_EQ(hyper_constant(1, 2), 2u);
  EXPECT_EQ(hyper_constant(1, 3), 6u);
  EXPECT_EQ(hyper_constant(2, 1), 4u);  // pair-or-quad covers of four singletons
  EXPECT_EQ(hyper_constant(2, 2), 212u);
  EXPECT_EQ(hyper_constant(2, 3), 41472u);
  EXPECT_EQ(hyper_constant(2, 2), oracle::count_graphs({2, 2, 2, 2}, true));
  EXPECT_EQ(hyper_constant(2, 3), oracle::count_graphs({3, 3, 3, 3}, true));
  EXPECT_EQ(hyper_constant(1, 4), 24u);
  EXPECT_THROW(hyper_constant(2, 4), SizeLimitError);
  EXPECT_NO_THROW(hyper_constant(1, 6));
  EXPECT_THROW(hyper_constant(0, 2), ArgumentError);
}

TEST(ContractGraph, Examples) {
  std::mt19937_64 rng(1);
  const auto a = random_kernel(rng, 3, 1);
  const auto b = random_kernel(rng, 3, 1);
  const DiscreteKernel pair[] = {a, b};
  EXPECT_NEAR(contract_graph(BlockGraph({1, 1}, {{0, 1}}), pair).scalar_value(), inner(a, b), 1e-14);

  const auto g = random_kernel(rng, 3, 2);
  const auto h = random_kernel(rng, 3, 2);
  const DiscreteKernel gh[] = {g, h};
  const auto c1 = contract_graph(BlockGraph({2, 2}, {{1, 2}}), gh);
  const auto ref1 = contract(g, h, 1);
  ASSERT_EQ(c1.degree(), 2);
  for (const auto& [idx, v] : ref1.entries()) EXPECT_NEAR(c1.at(idx), v, 1e-12);

  const auto full = contract_graph(BlockGraph({2, 2}, {{0, 3}, {1, 2}}), gh);
  EXPECT_NEAR(full.scalar_value(), contract(g, h, 2).scalar_value(), 1e-12);
  const auto none = contract_graph(BlockGraph({2, 2}, {}), gh);
  EXPECT_EQ(none.degree(), 4);
  EXPECT_NEAR(none.norm(), g.norm() * h.norm(), 1e-12);

  // A block of three points ties three factors to one index.
  const DiscreteKernel triple[] = {a, b, a};
  double s = 0.0;
  for (int i = 1; i <= 3; ++i) s += a.at({i}) * b.at({i}) * a.at({i});
  EXPECT_NEAR(contract_graph(BlockGraph({1, 1, 1}, {{0, 1, 2}}), triple).scalar_value(), s, 1e-12);

  EXPECT_THROW(contract_graph(BlockGraph({2, 2}, {{0, 1}}), gh), ArgumentError);
  EXPECT_THROW(contract_graph(BlockGraph({1, 1}, {{0, 1}}), gh), ArgumentError);
}

TEST(ContractGraph, NormBound) {
  std::mt19937_64 rng(2);
  const std::vector<int> shape{2, 1, 2};
  for (const auto& gamma : enumerate_graphs(shape, false)) {
    const DiscreteKernel f[] = {random_kernel(rng, 3, 2), random_kernel(rng, 3, 1), random_kernel(rng, 3, 2)};
    const double bound = f[0].norm() * f[1].norm() * f[2].norm();
    EXPECT_LE(contract_graph(gamma, f).norm(), bound * (1 + 1e-12));
  }
}

TEST(Hypercontractivity, Examples) {
  const auto r = Assignment::iid(6, Law::rademacher());
  const auto c1 = hypercontractivity_check(mirror_counterexample(6), r, 1);
  EXPECT_NEAR(c1.moment, 1.0, 1e-12);
  EXPECT_EQ(c1.constant, 6u);
  EXPECT_EQ(c1.mu, 1.0);
  EXPECT_TRUE(c1.holds);

  const auto c2 = hypercontractivity_check(quadratic_star(5), Assignment::iid(5, Law::semicircular()), 2);
  EXPECT_NEAR(c2.moment, 2.5, 1e-12);
  EXPECT_EQ(c2.constant, 212u);
  EXPECT_EQ(c2.mu, 1430.0);
  EXPECT_TRUE(c2.holds);

  const auto zero = hypercontractivity_check(CoefficientTensor(4, 2), Assignment::iid(4, Law::rademacher()), 2);
  EXPECT_EQ(zero.moment, 0.0);
  EXPECT_EQ(zero.bound, 0.0);
  EXPECT_TRUE(zero.holds);
}

TEST(Hypercontractivity, Preconditions) {
  CoefficientTensor f(3, 2);
  f.set({1, 2}, 1.0);
  EXPECT_THROW(hypercontractivity_check(f, Assignment::iid(3, Law::rademacher()), 1), ArgumentError);
  EXPECT_THROW(hypercontractivity_check(quadratic_star(3), Assignment::iid(3, Law::rademacher()), 0), ArgumentError);
  EXPECT_THROW(hypercontractivity_check(mirror_counterexample(4), Assignment::iid(4, Law::rademacher()), 2), CapacityError);
  EXPECT_NO_THROW(hypercontractivity_check(mirror_counterexample(4), Assignment::iid(4, Law::rademacher(64)), 2));
}

TEST(Hypercontractivity, RandomTensors) {
  std::mt19937_64 rng(3);
  const Law laws[] = {Law::rademacher(), Law::semicircular(), standardized_atoms({{2.0, 0.2}, {-0.5, 0.8}})};
  for (int trial = 0; trial < 30; ++trial) {
    RandomTensorSpec s;
    s.N = 3 + trial % 3;
    s.d = 1 + trial % 2;
    s.orbits = 3;
    const auto f = random_tensor(s, rng);
    const auto a = Assignment::iid(s.N, laws[trial % 3]);
    for (int r = 1; r <= 2; ++r) EXPECT_TRUE(hypercontractivity_check(f, a, r).holds) << trial << " r=" << r;
  }
}

TEST(WordBound, Examples) {
  const auto s = Assignment::iid(2, Law::semicircular());
  const auto w1 = word_bound_check(Word{1, 1, 1, 1}, s);
  EXPECT_EQ(w1.value, 2.0);
  EXPECT_EQ(w1.mu, 2.0);
  EXPECT_TRUE(w1.holds);
  const auto w2 = word_bound_check(Word{1, 2, 2, 1}, Assignment::iid(2, Law::rademacher()));
  EXPECT_EQ(w2.value, 1.0);
  EXPECT_TRUE(w2.holds);
  EXPECT_EQ(word_bound_check(Word{1, 2}, s).value, 0.0);
  EXPECT_THROW(word_bound_check(Word{1, 2, 1}, s), ArgumentError);
  EXPECT_THROW(word_bound_check(Word{}, s), ArgumentError);
  EXPECT_THROW(word_bound_check(Word(10, 1), s), CapacityError);
}

TEST(WordBound, RandomWordsAndLaws) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> letter(1, 3);
  Assignment a;
  a.assign(1, Law::rademacher());
  a.assign(2, standardized_atoms({{3.0, 0.1}, {-1.0 / 3.0, 0.9}}));
  a.assign(3, Law::semicircular());
  for (int trial = 0; trial < 200; ++trial) {
    Word w(static_cast<std::size_t>(2 + 2 * (trial % 4)));
    for (auto& x : w) x = letter(rng);
    EXPECT_TRUE(word_bound_check(w, a).holds) << trial;
  }
}
