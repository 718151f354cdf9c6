#pragma once

#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fciplus/augment.hpp"
#include "fciplus/dsep_plus.hpp"
#include "fciplus/orientation.hpp"
#include "fciplus/pc_search.hpp"
#include "fciplus/reference_fci.hpp"

namespace fciplus {

enum class Algorithm : std::uint8_t { kPc, kFci, kFciPlus };

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kPc: return "pc";
    case Algorithm::kFci: return "fci";
    case Algorithm::kFciPlus: return "fciplus";
  }
  return "unknown";
}

inline Algorithm parse_algorithm(const std::string& s) {
  if (s == "pc") return Algorithm::kPc;
  if (s == "fci") return Algorithm::kFci;
  if (s == "fciplus") return Algorithm::kFciPlus;
  throw InputError("unknown algorithm '" + s + "' (expected pc, fci or fciplus)");
}

struct InvariantResult {
  std::string name;
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::vector<std::string> examples;  // first few violations

  InvariantResult() = default;
  explicit InvariantResult(std::string n, std::size_t c = 0, std::size_t v = 0, std::vector<std::string> ex = {})
      : name(std::move(n)), checked(c), violations(v), examples(std::move(ex)) {}

  bool ok() const { return violations == 0; }
  void record(bool holds, const std::string& what) {
    ++checked;
    if (holds) return;
    ++violations;
    if (examples.size() < 5) examples.push_back(what);
  }
  friend bool operator==(const InvariantResult&, const InvariantResult&) = default;
};

struct RunReport {
  std::string algorithm;
  std::string instance;
  std::string graph_hash;
  std::uint64_t seed = 0;
  std::optional<int> k;
  bool intersect_pdsep = false;
  std::vector<std::string> names;
  MixedGraph pag;
  OracleStats stats;
  std::map<std::string, double> timings_ms;  // excluded from replay comparisons
  std::vector<std::pair<VarId, VarId>> dsep_links_detected;
  std::size_t dsep_resolutions = 0;
  std::size_t dsep_reactivations = 0;
  std::vector<DsepAttempt> dsep_attempts;
  std::size_t pdsep_removed = 0;
  std::vector<InvariantResult> invariants;

  bool invariants_ok() const {
    for (const auto& r : invariants)
      if (!r.ok()) return false;
    return true;
  }
};

struct PipelineOptions {
  std::optional<int> k = 3;
  bool intersect_pdsep = false;
  std::vector<std::string> names;
  const CausalDag* truth = nullptr;  // enables the invariant suite
  std::size_t brute_force_cap = 10;  // largest N for exponential invariant checks
};

struct PipelineResult {
  RunReport report;
  MixedGraph pc_skeleton;
  MixedGraph gplus;           // augmented skeleton before the D-sep stage
  MixedGraph final_skeleton;  // circle marks
  SepsetMap sepsets;          // final
  std::vector<MixedGraph> dsep_states;
};

// Ancestry and separation facts of a causal DAG, in observed-index space.
class GroundTruth {
 public:
  explicit GroundTruth(const CausalDag& dag) : dag_(dag), mag_(latent_project(dag)), oracle_(dag) {}

  const MixedGraph& mag() const { return mag_; }
  int size() const { return mag_.size(); }

  // v is an ancestor of some node of `of` or of the selection set.
  bool in_ancestors(VarId v, const VarSet& of) const {
    return ancestors(dag_, oracle_.to_dag(of) | dag_.selection()).contains(oracle_.dag_id(v));
  }
  bool separated(VarId x, VarId y, const VarSet& z) { return oracle_.query(x, y, z); }

  // Every strict subset fails to separate.
  bool minimal_by_brute_force(VarId x, VarId y, const VarSet& z) {
    return !for_each_subset_ascending(z, [&](const VarSet& s) { return s.size() < z.size() && separated(x, y, s); });
  }

 private:
  const CausalDag& dag_;
  MixedGraph mag_;
  DsepOracle oracle_;
};

// Pairs adjacent in `g` but not in the true MAG.
inline std::vector<std::pair<VarId, VarId>> spurious_adjacencies(const MixedGraph& g, const MixedGraph& mag) {
  std::vector<std::pair<VarId, VarId>> out;
  for (const Edge& e : g.edges())
    if (!mag.adjacent(e.a, e.b)) out.emplace_back(e.a, e.b);
  return out;
}

// True D-sep links of an instance: adjacencies the degree-bounded adjacency
// search leaves that the projected MAG does not have.
inline std::vector<std::pair<VarId, VarId>> true_dsep_links(const CausalDag& dag, std::optional<int> k) {
  DsepOracle oracle(dag);
  return spurious_adjacencies(pc_adjacency_search(oracle, k).skeleton, latent_project(dag));
}

namespace detail {

inline std::string pair_text(const MixedGraph& g, VarId a, VarId b) { return g.name(a) + "-" + g.name(b); }

inline void check_sepsets(const SepsetMap& sepsets, const MixedGraph& skeleton, GroundTruth& truth,
                          std::vector<InvariantResult>& out) {
  InvariantResult minimal{"sepset_minimality"}, ancestry{"sepset_ancestry"}, coverage{"sepset_coverage"};
  for (const auto& [pair, entry] : sepsets) {
    const auto [x, y] = pair;
    const std::string where = pair_text(skeleton, x, y) + " | " + to_string(entry.set);
    bool ok = truth.separated(x, y, entry.set);
    for (VarId w : entry.set) ok = ok && !truth.separated(x, y, entry.set.without(w));
    minimal.record(ok, where);
    for (VarId w : entry.set) ancestry.record(truth.in_ancestors(w, VarSet{x, y}), where + " member " + skeleton.name(w));
    coverage.record(!skeleton.adjacent(x, y), where + " stored for an adjacent pair");
  }
  for (VarId x = 0; x < skeleton.size(); ++x)
    for (VarId y = x + 1; y < skeleton.size(); ++y)
      if (!skeleton.adjacent(x, y)) coverage.record(sepsets.contains(x, y), pair_text(skeleton, x, y) + " has no sepset");
  out.push_back(std::move(minimal));
  out.push_back(std::move(ancestry));
  out.push_back(std::move(coverage));
}

inline void check_pag(const MixedGraph& pag, GroundTruth& truth, std::vector<InvariantResult>& out) {
  InvariantResult skel{"skeleton_matches_mag"}, marks{"pag_marks_sound"};
  const MixedGraph& mag = truth.mag();
  for (VarId a = 0; a < pag.size(); ++a)
    for (VarId b = a + 1; b < pag.size(); ++b)
      skel.record(pag.adjacent(a, b) == mag.adjacent(a, b), pair_text(pag, a, b));
  for (const Edge& e : pag.edges()) {
    for (auto [near, far] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
      const Mark m = pag.mark(near, far);
      if (m == Mark::kArrow) marks.record(!truth.in_ancestors(near, VarSet{far}), "arrow at " + pag.name(near) + " on " + pair_text(pag, near, far));
      if (m == Mark::kTail) marks.record(truth.in_ancestors(near, VarSet{far}), "tail at " + pag.name(near) + " on " + pair_text(pag, near, far));
    }
  }
  out.push_back(std::move(skel));
  out.push_back(std::move(marks));
}

inline void check_dsep_stage(const PipelineResult& res, GroundTruth& truth, std::size_t cap,
                             std::vector<InvariantResult>& out) {
  const MixedGraph& mag = truth.mag();
  InvariantResult arrows{"augment_arrowheads_sound"}, pattern{"dsep_pattern_presence"}, lemma3{"dsep_link_ancestry"},
      hier{"hierarchy_ancestry"}, seeded{"true_ancestor_hierarchy_separates"}, brute{"minimal_dsep_brute_force"};

  for (const MixedGraph& state : res.dsep_states) {
    for (const Edge& e : state.edges())
      for (auto [near, far] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}})
        if (state.is_arrow(near, far))
          arrows.record(!truth.in_ancestors(near, VarSet{far}), "arrow at " + state.name(near) + " on " + pair_text(state, near, far));

    const auto links = spurious_adjacencies(state, mag);
    const auto detected = find_possible_dsep_links(state);
    for (const auto& [x, y] : links) {
      const VarSet an = ancestors(mag, VarSet{x, y});
      bool other_inside = false;
      for (const auto& [a, b] : links)
        if (!(a == x && b == y) && an.contains(a) && an.contains(b)) other_inside = true;
      if (other_inside) continue;
      bool found = false;
      for (const PosDsepLink& l : detected) found = found || (l.x == x && l.y == y);
      pattern.record(found, pair_text(state, x, y) + " not detected");
    }
  }

  for (const DsepAttempt& at : res.report.dsep_attempts) {
    if (!at.resolved) continue;
    const std::string where = pair_text(res.gplus, at.x, at.y) + " | " + to_string(at.separator);
    lemma3.record(!truth.in_ancestors(at.x, at.separator.with(at.y)) && !truth.in_ancestors(at.y, at.separator.with(at.x)),
                  where + " endpoint is an ancestor");
    for (VarId z : at.separator) lemma3.record(truth.in_ancestors(z, VarSet{at.x, at.y}), where + " member " + res.gplus.name(z));
    const VarSet seed = at.base | VarSet{at.x, at.y};
    for (VarId h : at.hierarchy - seed)
      hier.record(truth.in_ancestors(h, seed), where + " hierarchy member " + res.gplus.name(h));
    if (static_cast<std::size_t>(truth.size()) <= cap)
      brute.record(truth.minimal_by_brute_force(at.x, at.y, at.separator), where);
  }

  for (const auto& [x, y] : spurious_adjacencies(res.pc_skeleton, mag)) {
    SepsetMap without = res.sepsets;
    without.erase(x, y);
    const VarSet aa = ((mag.neighbors(x) | mag.neighbors(y)) & ancestors(mag, VarSet{x, y})) - VarSet{x, y};
    const VarSet z = hie(aa, without).closure - VarSet{x, y};
    seeded.record(truth.separated(x, y, z), pair_text(mag, x, y) + " seed " + to_string(aa));
  }

  out.push_back(std::move(arrows));
  out.push_back(std::move(pattern));
  out.push_back(std::move(lemma3));
  out.push_back(std::move(hier));
  out.push_back(std::move(seeded));
  if (static_cast<std::size_t>(truth.size()) <= cap) out.push_back(std::move(brute));
}

inline void check_budget(const RunReport& r, int n, std::vector<InvariantResult>& out) {
  if (!r.k) return;
  InvariantResult budget{"query_budget"};
  const double nn = n, kk = *r.k;
  budget.record(static_cast<double>(r.stats.total_queries()) <= std::pow(nn, 2.0 * (kk + 2.0)), "total queries");
  budget.record(static_cast<double>(r.stats[Stage::kPcSearch].queries) <= 4.0 * std::pow(nn, kk + 2.0),
                "adjacency search queries");
  out.push_back(std::move(budget));
}

class StageTimer {
 public:
  StageTimer(std::map<std::string, double>& into, const char* key)
      : into_(into), key_(key), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    into_[key_] += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::map<std::string, double>& into_;
  const char* key_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// Runs one algorithm end to end. pc: adjacency search followed by the
// orientation phase. fci: the reference implementation. fciplus: adjacency
// search, augmentation, D-sep search, then orientation on the augmented
// marks. With a ground-truth DAG the invariant suite is embedded.
inline PipelineResult run_pipeline(Algorithm alg, IndependenceOracle& oracle, const PipelineOptions& opt = {}) {
  PipelineResult res;
  RunReport& r = res.report;
  r.algorithm = algorithm_name(alg);
  r.k = opt.k;
  r.intersect_pdsep = opt.intersect_pdsep;
  oracle.reset_stats();
  const int n = oracle.size();
  std::vector<std::string> names = opt.names;
  if (names.empty())
    for (int i = 0; i < n; ++i) names.push_back("V" + std::to_string(i));
  if (static_cast<int>(names.size()) != n) throw InputError("name table does not match the oracle's variable count");
  r.names = names;

  if (alg == Algorithm::kFci) {
    ReferenceFciResult ref;
    {
      detail::StageTimer t(r.timings_ms, "reference");
      ref = fci_reference(oracle, opt.k, names);
    }
    r.pag = ref.pag;
    r.pdsep_removed = ref.pdsep_removed;
    res.final_skeleton = ref.skeleton;
    res.sepsets = ref.sepsets;
    res.pc_skeleton = ref.skeleton;
  } else {
    AdjacencySearchResult pc;
    {
      detail::StageTimer t(r.timings_ms, "pc_search");
      pc = pc_adjacency_search(oracle, opt.k, names);
    }
    res.pc_skeleton = pc.skeleton;
    MixedGraph working = pc.skeleton;
    SepsetMap sepsets = pc.sepsets;
    if (alg == Algorithm::kFciPlus) {
      {
        detail::StageTimer t(r.timings_ms, "augment");
        res.gplus = augment_graph(pc.skeleton, pc.sepsets, oracle);
      }
      DsepSearchOptions dopt;
      dopt.k = opt.k ? *opt.k : static_cast<int>(res.gplus.max_degree());
      dopt.intersect_pdsep = opt.intersect_pdsep;
      if (opt.truth) dopt.observer = [&](const MixedGraph& g, const SepsetMap&) { res.dsep_states.push_back(g); };
      DsepSearchResult ds;
      {
        detail::StageTimer t(r.timings_ms, "dsep_search");
        ds = dsep_search(res.gplus, pc.sepsets, oracle, dopt);
      }
      for (const auto& l : ds.log.initial_links) r.dsep_links_detected.push_back(l);
      r.dsep_resolutions = ds.log.resolutions;
      r.dsep_reactivations = ds.log.reactivations;
      r.dsep_attempts = ds.log.attempts;
      working = ds.gplus;
      sepsets = std::move(ds.sepsets);
    }
    {
      detail::StageTimer t(r.timings_ms, "orientation");
      StageScope scope(oracle, Stage::kOrientation);
      r.pag = orient_pag(working, sepsets);
    }
    res.final_skeleton = working.skeleton();
    res.sepsets = std::move(sepsets);
  }
  r.stats = oracle.stats();

  if (opt.truth) {
    GroundTruth truth(*opt.truth);
    if (truth.size() != n) throw InputError("ground-truth DAG does not match the oracle");
    detail::check_sepsets(res.sepsets, res.final_skeleton, truth, r.invariants);
    if (alg != Algorithm::kPc) detail::check_pag(r.pag, truth, r.invariants);
    if (alg == Algorithm::kFciPlus) {
      detail::check_dsep_stage(res, truth, opt.brute_force_cap, r.invariants);
      InvariantResult agree{"orientation_inputs_agree"};
      agree.record(orient_pag(res.final_skeleton, res.sepsets) == r.pag, "fresh skeleton gives a different PAG");
      r.invariants.push_back(std::move(agree));
    }
  }
  detail::check_budget(r, n, r.invariants);
  return res;
}

// Convenience: d-separation oracle over the DAG, observed names, invariants on.
inline PipelineResult run_on_dag(Algorithm alg, const CausalDag& dag, PipelineOptions opt = {}) {
  DsepOracle oracle(dag);
  if (opt.names.empty())
    for (VarId v : dag.observed()) opt.names.push_back(dag.name(v));
  opt.truth = &dag;
  return run_pipeline(alg, oracle, opt);
}

struct RunDiff {
  std::vector<std::string> pag_differences;
  std::vector<std::string> stat_deltas;
  bool differs() const { return !pag_differences.empty(); }
};

// Structural PAG diff plus per-stage query deltas (b minus a).
inline RunDiff compare_runs(const RunReport& a, const RunReport& b) {
  if (a.names != b.names) throw InputError("reports have different variable tables");
  RunDiff d;
  const MixedGraph &ga = a.pag, &gb = b.pag;
  for (VarId x = 0; x < ga.size(); ++x) {
    for (VarId y = x + 1; y < ga.size(); ++y) {
      const std::string pair = a.names[static_cast<std::size_t>(x)] + " - " + a.names[static_cast<std::size_t>(y)];
      const bool in_a = ga.adjacent(x, y), in_b = gb.adjacent(x, y);
      if (in_a && !in_b) d.pag_differences.push_back("edge " + pair + " only in a");
      else if (!in_a && in_b) d.pag_differences.push_back("edge " + pair + " only in b");
      else if (in_a && (ga.mark(x, y) != gb.mark(x, y) || ga.mark(y, x) != gb.mark(y, x)))
        d.pag_differences.push_back("marks on " + pair + ": a has " + mark_name(ga.mark(x, y)) + "/" +
                                    mark_name(ga.mark(y, x)) + ", b has " + mark_name(gb.mark(x, y)) + "/" +
                                    mark_name(gb.mark(y, x)));
    }
  }
  for (Stage s : kAllStages) {
    const auto qa = static_cast<long long>(a.stats[s].queries), qb = static_cast<long long>(b.stats[s].queries);
    if (qa != qb) d.stat_deltas.push_back(std::string(stage_name(s)) + " queries " + std::to_string(qb - qa));
  }
  return d;
}

}  // namespace fciplus
