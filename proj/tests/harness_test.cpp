#include <gtest/gtest.h>

#include "fciplus/generator.hpp"
#include "fciplus/io.hpp"
#include "fciplus/pipeline.hpp"

namespace fciplus {
namespace {

GeneratorConfig cfg_of(int n, int lat, int sel, std::uint64_t seed) {
  GeneratorConfig c;
  c.n = n;
  c.latents = lat;
  c.selection = sel;
  c.density = 2.4 / (n + lat + sel - 1);
  c.seed = seed;
  return c;
}

TEST(Generator, DeterministicPerSeed) {
  const GeneratorConfig c = cfg_of(10, 2, 1, 17);
  const CausalDag a = random_sparse_dag(c);
  const CausalDag b = random_sparse_dag(c);
  EXPECT_EQ(dag_to_json(a), dag_to_json(b));
  GeneratorConfig other = c;
  other.seed = 18;
  EXPECT_NE(dag_to_json(a), dag_to_json(random_sparse_dag(other)));
}

TEST(Generator, RolesNamesAndDegreeBound) {
  for (std::uint64_t s = 0; s < 60; ++s) {
    const GeneratorConfig c = cfg_of(8 + static_cast<int>(s % 7), static_cast<int>(s % 4), static_cast<int>(s % 2), s);
    const CausalDag dag = random_sparse_dag(c);
    EXPECT_EQ(static_cast<int>(dag.observed().size()), c.n);
    EXPECT_EQ(static_cast<int>(dag.latent().size()), c.latents);
    EXPECT_EQ(static_cast<int>(dag.selection().size()), c.selection);
    EXPECT_LE(latent_project(dag).max_degree(), static_cast<std::size_t>(c.k));
    for (VarId v : dag.latent()) EXPECT_EQ(dag.name(v)[0], 'L');
    for (VarId v : dag.selection()) EXPECT_EQ(dag.name(v)[0], 'S');
    for (VarId v : dag.observed()) EXPECT_EQ(dag.name(v)[0], 'X');
  }
}

TEST(Generator, SufficientDagProjectsToItself) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const CausalDag dag = random_sparse_dag(cfg_of(9, 0, 0, s));
    EXPECT_EQ(latent_project(dag), dag.graph());
  }
}

TEST(Generator, GadgetsPlantTrueDsepLinks) {
  for (std::uint64_t s = 0; s < 15; ++s) {
    GeneratorConfig c = cfg_of(10, 2, 0, 40 + s);
    c.dsep_gadgets = 1;
    EXPECT_FALSE(true_dsep_links(random_sparse_dag(c), c.k).empty()) << "seed " << c.seed;
  }
  GeneratorConfig bad = cfg_of(10, 1, 0, 1);
  bad.dsep_gadgets = 1;
  EXPECT_THROW(random_sparse_dag(bad), InputError);
}

TEST(Generator, RejectsBadConfigAndReportsExhaustion) {
  GeneratorConfig c = cfg_of(10, 0, 0, 1);
  c.n = 1;
  EXPECT_THROW(random_sparse_dag(c), InputError);
  c = cfg_of(10, 0, 0, 1);
  c.k = 0;
  EXPECT_THROW(random_sparse_dag(c), InputError);
  c = cfg_of(14, 0, 0, 1);
  c.density = 0.95;
  c.max_attempts = 20;
  try {
    random_sparse_dag(c);
    FAIL() << "expected the attempt budget to run out";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("largest rejected MAG degree"), std::string::npos);
  }
}

TEST(CanonicalExamples, AllValidate) {
  const auto all = canonical_examples();
  ASSERT_EQ(all.size(), 3u);
  for (const auto& ex : all) {
    EXPECT_FALSE(ex.facts.empty());
    EXPECT_NO_THROW(validate_example(ex));
  }
  EXPECT_THROW(canonical_example("figure9"), InputError);
}

TEST(CanonicalExamples, BrokenReconstructionIsRejected) {
  CanonicalExample ex = canonical_example("figure4b");
  // Z -> X makes Z adjacent to X.
  GraphBuilder b = ex.dag.graph().edit();
  b.add_directed(ex.dag.observed()[static_cast<std::size_t>(ex.var("Z"))],
                 ex.dag.observed()[static_cast<std::size_t>(ex.var("X"))]);
  ex.dag = CausalDag(std::move(b).build(), ex.dag.roles());
  try {
    validate_example(ex);
    FAIL() << "expected a violated fact";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("figure4b"), std::string::npos);
  }
}

TEST(CanonicalExamples, Figure5HierarchyIsOneSided) {
  const CanonicalExample ex = canonical_example("figure5");
  DsepOracle o(ex.dag);
  EXPECT_TRUE(o.query(ex.var("X"), ex.var("Y"), ex.vars({"S", "T", "U", "V", "W", "Z"})));
  EXPECT_TRUE(o.query(ex.var("X"), ex.var("Z"), ex.vars({"S", "T", "W"})));
  EXPECT_FALSE(o.query(ex.var("X"), ex.var("Z"), ex.vars({"S", "T", "W", "Y"})));
}

TEST(Pipeline, PcEqualsFciPlusWhenSufficient) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const CausalDag dag = random_sparse_dag(cfg_of(9, 0, 0, 100 + s));
    const auto pc = run_on_dag(Algorithm::kPc, dag);
    const auto plus = run_on_dag(Algorithm::kFciPlus, dag);
    EXPECT_EQ(pc.report.pag, plus.report.pag);
    EXPECT_TRUE(plus.report.dsep_links_detected.empty());
    EXPECT_TRUE(plus.report.invariants_ok());
  }
}

TEST(Pipeline, CanonicalExamplesLoseTheirDsepLink) {
  for (const CanonicalExample& ex : canonical_examples()) {
    PipelineOptions opt;
    opt.k = ex.k;
    const auto pc = run_on_dag(Algorithm::kPc, ex.dag, opt);
    const auto plus = run_on_dag(Algorithm::kFciPlus, ex.dag, opt);
    const auto fci = run_on_dag(Algorithm::kFci, ex.dag, opt);
    EXPECT_TRUE(pc.report.pag.adjacent(ex.var("X"), ex.var("Y"))) << ex.name;
    EXPECT_FALSE(plus.report.pag.adjacent(ex.var("X"), ex.var("Y"))) << ex.name;
    EXPECT_EQ(plus.report.pag, fci.report.pag) << ex.name;
    EXPECT_EQ(plus.final_skeleton.skeleton(), latent_project(ex.dag).skeleton()) << ex.name;
    for (const auto& inv : plus.report.invariants) EXPECT_TRUE(inv.ok()) << ex.name << " " << inv.name;
  }
}

TEST(Pipeline, QueryBudgetHolds) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    GeneratorConfig c = cfg_of(8 + static_cast<int>(s % 7), 2, static_cast<int>(s % 2), 300 + s);
    c.dsep_gadgets = s % 2 ? 1 : 0;
    const auto r = run_on_dag(Algorithm::kFciPlus, random_sparse_dag(c)).report;
    const double n = static_cast<double>(r.names.size());
    EXPECT_LE(static_cast<double>(r.stats.total_queries()), std::pow(n, 2.0 * (3 + 2)));
    EXPECT_LE(static_cast<double>(r.stats[Stage::kPcSearch].queries), 4.0 * std::pow(n, 3 + 2));
    bool budget_checked = false;
    for (const auto& inv : r.invariants)
      if (inv.name == "query_budget") budget_checked = inv.ok();
    EXPECT_TRUE(budget_checked);
  }
}

TEST(Pipeline, ReplayIsBitIdentical) {
  GeneratorConfig c = cfg_of(11, 3, 1, 77);
  c.dsep_gadgets = 1;
  const CausalDag dag = random_sparse_dag(c);
  const auto a = run_on_dag(Algorithm::kFciPlus, dag).report;
  const auto b = run_on_dag(Algorithm::kFciPlus, random_sparse_dag(c)).report;
  EXPECT_EQ(replay_view(a).dump(), replay_view(b).dump());
}

TEST(Pipeline, UnknownAlgorithmAndNameMismatch) {
  EXPECT_THROW(parse_algorithm("rfci"), InputError);
  EXPECT_EQ(parse_algorithm("fciplus"), Algorithm::kFciPlus);
  const CanonicalExample ex = canonical_example("figure4b");
  DsepOracle o(ex.dag);
  PipelineOptions opt;
  opt.names = {"just", "two"};
  EXPECT_THROW(run_pipeline(Algorithm::kPc, o, opt), InputError);
}

TEST(CompareRuns, IdenticalReportsHaveNoDiff) {
  const CanonicalExample ex = canonical_example("figure4b");
  const auto r = run_on_dag(Algorithm::kFciPlus, ex.dag).report;
  const RunDiff d = compare_runs(r, r);
  EXPECT_FALSE(d.differs());
  EXPECT_TRUE(d.stat_deltas.empty());
}

TEST(CompareRuns, PcVersusFciPlusOnFigure4b) {
  const CanonicalExample ex = canonical_example("figure4b");
  const auto pc = run_on_dag(Algorithm::kPc, ex.dag).report;
  const auto plus = run_on_dag(Algorithm::kFciPlus, ex.dag).report;
  const RunDiff d = compare_runs(pc, plus);
  ASSERT_TRUE(d.differs());
  std::vector<std::string> edge_lines;
  for (const auto& s : d.pag_differences)
    if (s.rfind("edge ", 0) == 0) edge_lines.push_back(s);
  ASSERT_EQ(edge_lines.size(), 1u);
  EXPECT_EQ(edge_lines[0], "edge X - Y only in a");
  EXPECT_FALSE(d.stat_deltas.empty());
}

TEST(CompareRuns, MismatchedTablesRejected) {
  const auto a = run_on_dag(Algorithm::kPc, canonical_example("figure4b").dag).report;
  const auto b = run_on_dag(Algorithm::kPc, canonical_example("figure5").dag).report;
  EXPECT_THROW(compare_runs(a, b), InputError);
}

}  // namespace
}  // namespace fciplus
