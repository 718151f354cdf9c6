#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fciplus/gauss_oracle.hpp"
#include "fciplus/oracle.hpp"
#include "support/brute_force.hpp"

namespace fciplus {
namespace {

CausalDag dag_of(int n, std::initializer_list<std::pair<VarId, VarId>> edges, std::vector<Role> roles = {}) {
  GraphBuilder b(n);
  for (auto [from, to] : edges) b.add_directed(from, to);
  if (roles.empty()) roles.assign(static_cast<std::size_t>(n), Role::kObserved);
  return CausalDag(std::move(b).build(), std::move(roles));
}

TEST(DsepOracle, SpecExamples) {
  DsepOracle adjacent(dag_of(2, {{0, 1}}));
  EXPECT_FALSE(adjacent.query(0, 1, {}));

  DsepOracle chain(dag_of(3, {{0, 2}, {2, 1}}));
  EXPECT_TRUE(chain.query(0, 1, VarSet{2}));

  // X -> S <- Y with S selected: implicit conditioning opens the collider.
  DsepOracle sel(dag_of(3, {{0, 2}, {1, 2}}, {Role::kObserved, Role::kObserved, Role::kSelection}));
  EXPECT_EQ(sel.size(), 2);
  EXPECT_FALSE(sel.query(0, 1, {}));
}

TEST(DsepOracle, RejectsHiddenAndMalformedQueries) {
  DsepOracle o(dag_of(3, {{2, 0}, {2, 1}}, {Role::kObserved, Role::kObserved, Role::kLatent}));
  EXPECT_THROW(o.query(0, 2, {}), InputError);
  EXPECT_THROW(o.query(0, 1, VarSet{2}), InputError);
  EXPECT_THROW(o.query(0, 0, {}), InputError);
  EXPECT_THROW(o.query(0, 1, VarSet{0}), InputError);
  EXPECT_EQ(o.stats().total_queries(), 0u);
}

TEST(DsepOracle, DelegatesToDSeparation) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const CausalDag dag = testing::random_test_dag(rng, 6, 2, trial % 2, 0.3);
    DsepOracle o(dag);
    for (VarId x = 0; x < o.size(); ++x)
      for (VarId y = 0; y < o.size(); ++y) {
        if (x == y) continue;
        for (const VarSet& z : testing::all_subsets(range_set(o.size()) - VarSet{x, y}))
          ASSERT_EQ(o.query(x, y, z), d_separated(dag, o.dag_id(x), o.dag_id(y), o.to_dag(z) | dag.selection()));
      }
  }
}

TEST(OracleStats, CountsMemoHitsAndDistinct) {
  DsepOracle o(dag_of(3, {{0, 2}, {2, 1}}));
  o.query(0, 1, VarSet{2});
  o.query(1, 0, VarSet{2});
  o.query(0, 1, {});
  const auto& pc = o.stats()[Stage::kPcSearch];
  EXPECT_EQ(pc.queries, 3u);
  EXPECT_EQ(pc.distinct, 2u);
  EXPECT_EQ(pc.max_cond_size, 1u);
}

TEST(OracleStats, StagePartitionSumsToTotal) {
  DsepOracle o(dag_of(4, {{0, 1}, {1, 2}, {2, 3}}));
  {
    StageScope a(o, Stage::kAugment);
    o.query(0, 2, VarSet{1});
    {
      StageScope b(o, Stage::kReference);
      o.query(0, 3, {});
      o.query(0, 2, VarSet{1});
    }
    EXPECT_EQ(o.stage(), Stage::kAugment);
    o.query(1, 3, VarSet{2});
  }
  EXPECT_EQ(o.stage(), Stage::kPcSearch);
  const OracleStats& s = o.stats();
  EXPECT_EQ(s[Stage::kAugment].queries, 2u);
  EXPECT_EQ(s[Stage::kReference].queries, 2u);
  EXPECT_EQ(s[Stage::kReference].distinct, 1u);
  std::size_t sum = 0, distinct = 0;
  for (Stage st : kAllStages) {
    sum += s[st].queries;
    distinct += s[st].distinct;
  }
  EXPECT_EQ(sum, s.total_queries());
  EXPECT_EQ(distinct, s.total_distinct());
  EXPECT_EQ(s.total_queries(), 4u);
  EXPECT_EQ(s.total_distinct(), 3u);
}

TEST(DsepOracle, MemoOnAndOffGiveIdenticalAnswers) {
  std::mt19937_64 rng(8);
  const CausalDag dag = testing::random_test_dag(rng, 7, 2, 1, 0.3);
  DsepOracle with(dag), without(dag);
  without.set_memoize(false);
  std::uniform_int_distribution<int> pick(0, with.size() - 1);
  for (int i = 0; i < 2000; ++i) {
    const VarId x = pick(rng), y = pick(rng);
    if (x == y) continue;
    std::vector<VarId> z;
    for (int j = 0; j < 3; ++j) {
      const VarId v = pick(rng);
      if (v != x && v != y) z.push_back(v);
    }
    ASSERT_EQ(with.query(x, y, VarSet(z)), without.query(x, y, VarSet(z)));
  }
  EXPECT_EQ(with.stats(), without.stats());
}

TEST(FisherZ, ZeroCorrelationIsIndependent) {
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(3, 3);
  for (double alpha : {0.001, 0.01, 0.2, 0.9}) {
    const FisherZResult r = fisher_z_test(cov, 50, 0, 1, VarSet{2}, alpha);
    EXPECT_TRUE(r.independent);
    EXPECT_DOUBLE_EQ(r.statistic, 0.0);
  }
}

TEST(FisherZ, SingularSubmatrixIsReportedDependent) {
  Eigen::MatrixXd cov(3, 3);
  cov << 1, 0.5, 1, 0.5, 1, 0.5, 1, 0.5, 1;  // column 2 duplicates column 0
  const FisherZResult r = fisher_z_test(cov, 100, 0, 1, VarSet{2}, 0.01);
  EXPECT_TRUE(r.singular);
  EXPECT_FALSE(r.independent);
}

TEST(FisherZ, RejectsBadArguments) {
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_THROW(fisher_z_test(cov, 4, 0, 1, VarSet{2}, 0.01), InputError);
  EXPECT_THROW(fisher_z_test(cov, 100, 0, 1, {}, 0.0), InputError);
}

// Samples n rows of a linear Gaussian SEM given by its coefficient matrix
// (b(i, j) is the weight of j in i), nodes in index order.
Eigen::MatrixXd simulate(const Eigen::MatrixXd& b, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  const auto p = b.rows();
  Eigen::MatrixXd x(n, p);
  for (int r = 0; r < n; ++r)
    for (Eigen::Index i = 0; i < p; ++i) {
      double v = noise(rng);
      for (Eigen::Index j = 0; j < i; ++j) v += b(i, j) * x(r, j);
      x(r, i) = v;
    }
  return x;
}

TEST(FisherZ, StrongEdgeIsRejectedAlmostAlways) {
  std::mt19937_64 rng(1);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2, 2);
  b(1, 0) = 0.8;
  int dependent = 0;
  const int sims = 200;
  for (int s = 0; s < sims; ++s) {
    Dataset ds{{"X", "Y"}, simulate(b, 1000, rng)};
    GaussOracle o = GaussOracle::from_data(ds, 0.01);
    dependent += !o.query(0, 1, {});
  }
  EXPECT_GT(dependent, sims * 99 / 100);
}

TEST(FisherZ, ChainIsCalibrated) {
  std::mt19937_64 rng(2);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(3, 3);  // X=0 -> Z=1 -> Y=2
  b(1, 0) = 0.7;
  b(2, 1) = 0.7;
  int independent = 0;
  const int sims = 400;
  for (int s = 0; s < sims; ++s) {
    Dataset ds{{"X", "Z", "Y"}, simulate(b, 1000, rng)};
    GaussOracle o = GaussOracle::from_data(ds, 0.01);
    independent += o.query(0, 2, VarSet{1});
  }
  EXPECT_GE(independent, sims * 95 / 100);
}

TEST(GaussOracle, CsvParsingAndRejection) {
  std::istringstream ok("a,b,c\n1,2,3\n2,1,0\n3,5,1\n4,4,4\n0.5,1e-1,-2\n");
  const Dataset ds = read_csv(ok);
  ASSERT_EQ(ds.names.size(), 3u);
  EXPECT_EQ(ds.values.rows(), 5);
  EXPECT_DOUBLE_EQ(ds.values(4, 1), 0.1);
  EXPECT_NO_THROW(GaussOracle::from_data(ds));

  std::istringstream constant("a,b\n1,2\n1,3\n1,4\n1,5\n");
  EXPECT_THROW(GaussOracle::from_data(read_csv(constant)), InputError);
  std::istringstream ragged("a,b\n1,2\n3\n");
  EXPECT_THROW(read_csv(ragged), InputError);
  std::istringstream junk("a,b\n1,2x\n");
  EXPECT_THROW(read_csv(junk), InputError);
  std::istringstream empty("");
  EXPECT_THROW(read_csv(empty), InputError);
}

}  // namespace
}  // namespace fciplus
