#include <gtest/gtest.h>

#include <random>

#include "fciplus/augment.hpp"
#include "fciplus/orientation.hpp"
#include "fciplus/pc_search.hpp"
#include "support/brute_force.hpp"

namespace fciplus {
namespace {

CausalDag dag_of(int n, std::initializer_list<std::pair<VarId, VarId>> edges) {
  GraphBuilder b(n);
  for (auto [from, to] : edges) b.add_directed(from, to);
  return CausalDag(std::move(b).build(), std::vector<Role>(static_cast<std::size_t>(n), Role::kObserved));
}

TEST(Augment, UnshieldedColliderGetsArrowheads) {
  DsepOracle o(dag_of(3, {{0, 2}, {1, 2}}));
  const auto pc = pc_adjacency_search(o);
  const MixedGraph g = augment_graph(pc.skeleton, pc.sepsets, o);
  EXPECT_TRUE(g.is_arrow(2, 0));
  EXPECT_TRUE(g.is_arrow(2, 1));
  EXPECT_TRUE(g.is_circle(0, 2));
  EXPECT_TRUE(g.is_circle(1, 2));
}

TEST(Augment, ChainIsUnchanged) {
  DsepOracle o(dag_of(3, {{0, 2}, {2, 1}}));
  const auto pc = pc_adjacency_search(o);
  const std::size_t before = o.stats().total_queries();
  const MixedGraph g = augment_graph(pc.skeleton, pc.sepsets, o);
  EXPECT_EQ(g, pc.skeleton);
  EXPECT_EQ(o.stats().total_queries(), before);
}

TEST(Augment, RefusesToOverwriteTail) {
  DsepOracle o(dag_of(3, {{0, 2}, {1, 2}}));
  const auto pc = pc_adjacency_search(o);
  const MixedGraph tailed = pc.skeleton.edit().set_mark(2, 0, Mark::kTail).build();
  EXPECT_THROW(augment_graph(tailed, pc.sepsets, o), ModelViolation);
}

struct Instance {
  CausalDag dag;
  AdjacencySearchResult pc;
  MixedGraph gplus;
};

std::vector<Instance> corpus(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<Instance> out;
  for (int i = 0; i < count; ++i) {
    CausalDag dag = testing::random_test_dag(rng, 7 + i % 4, i % 4, i % 3 == 0, 0.25);
    DsepOracle o(dag);
    auto pc = pc_adjacency_search(o);
    MixedGraph gplus = augment_graph(pc.skeleton, pc.sepsets, o);
    out.push_back({std::move(dag), std::move(pc), std::move(gplus)});
  }
  return out;
}

TEST(Augment, ArrowheadsAreSoundAgainstTruth) {
  for (const Instance& in : corpus(41, 80)) {
    const VarSet& obs = in.dag.observed();
    for (const Edge& e : in.gplus.edges()) {
      for (auto [near, far] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
        if (!in.gplus.is_arrow(near, far)) continue;
        const VarSet an = ancestors(in.dag, VarSet{obs[far]} | in.dag.selection());
        ASSERT_FALSE(an.contains(obs[near])) << "arrow at " << near << " on edge to " << far;
      }
    }
  }
}

TEST(Augment, ContainsUnshieldedColliderArrowheads) {
  for (const Instance& in : corpus(42, 60)) {
    const MixedGraph pi0 = orient_v_structures(in.pc.skeleton, in.pc.sepsets);
    for (const Edge& e : pi0.edges()) {
      if (pi0.is_arrow(e.a, e.b)) {
        EXPECT_TRUE(in.gplus.is_arrow(e.a, e.b));
      }
      if (pi0.is_arrow(e.b, e.a)) {
        EXPECT_TRUE(in.gplus.is_arrow(e.b, e.a));
      }
    }
  }
}

TEST(Augment, Idempotent) {
  for (const Instance& in : corpus(43, 40)) {
    DsepOracle o(in.dag);
    EXPECT_EQ(augment_graph(in.gplus, in.pc.sepsets, o), in.gplus);
  }
}

}  // namespace
}  // namespace fciplus
