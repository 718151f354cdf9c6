#pragma once

#include <optional>

#include "fciplus/orientation.hpp"
#include "fciplus/pc_search.hpp"
#include "fciplus/possible_dsep.hpp"

namespace fciplus {

inline constexpr int kDefaultBruteForceCap = 14;

struct ReferenceFciResult {
  MixedGraph pag;
  MixedGraph skeleton;  // after the Possible-D-SEP stage, circle marks
  SepsetMap sepsets;
  std::size_t pdsep_removed = 0;
};

// Classic FCI: adjacency search, unshielded colliders, exhaustive subset
// search of Possible-D-SEP for every remaining edge, then orientation from
// scratch on the reduced skeleton.
inline ReferenceFciResult fci_reference(IndependenceOracle& oracle, std::optional<int> k = std::nullopt,
                                        std::vector<std::string> names = {}) {
  AdjacencySearchResult pc = pc_adjacency_search(oracle, k, std::move(names));
  const MixedGraph pi0 = orient_v_structures(pc.skeleton, pc.sepsets);
  const int n = pi0.size();

  std::vector<VarSet> pds(static_cast<std::size_t>(n));
  GraphBuilder reduced = pc.skeleton.edit();
  SepsetMap sepsets = pc.sepsets;
  ReferenceFciResult res;
  {
    StageScope scope(oracle, Stage::kReference);
    for (const Edge& e : pi0.edges()) {
      std::optional<VarSet> found;
      for (const auto& [from, other] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
        const VarSet cand = possible_dsep(pi0, from, other);
        for_each_subset_ascending(cand, [&](const VarSet& z) {
          if (oracle.query(e.a, e.b, z)) found = z;
          return found.has_value();
        });
        if (found) break;
      }
      if (found) {
        sepsets.set(e.a, e.b, *found, static_cast<int>(found->size()), SepsetMap::Origin::kReference);
        reduced.remove_edge(e.a, e.b);
        ++res.pdsep_removed;
      }
    }
  }
  res.skeleton = std::move(reduced).build().skeleton();
  StageScope scope(oracle, Stage::kOrientation);
  res.pag = orient_pag(res.skeleton, sepsets);
  res.sepsets = std::move(sepsets);
  return res;
}

// Ground-truth skeleton: a pair stays adjacent iff no subset of the other
// variables separates it. Subsets are tried by ascending size, so stored
// separators are minimal. Refuses instances above `cap` variables.
inline AdjacencySearchResult exhaustive_skeleton(IndependenceOracle& oracle, int cap = kDefaultBruteForceCap,
                                                 std::vector<std::string> names = {}) {
  const int n = oracle.size();
  if (n > cap)
    throw InputError("exhaustive skeleton search refused: " + std::to_string(n) + " variables exceeds cap " +
                     std::to_string(cap));
  StageScope scope(oracle, Stage::kReference);
  GraphBuilder g(n, std::move(names));
  AdjacencySearchResult res;
  for (VarId x = 0; x < n; ++x) {
    for (VarId y = x + 1; y < n; ++y) {
      const VarSet others = range_set(n) - VarSet{x, y};
      std::optional<VarSet> found;
      for_each_subset_ascending(others, [&](const VarSet& z) {
        if (oracle.query(x, y, z)) found = z;
        return found.has_value();
      });
      if (found) {
        res.sepsets.set(x, y, *found, static_cast<int>(found->size()), SepsetMap::Origin::kExhaustive);
        res.last_level = std::max(res.last_level, static_cast<int>(found->size()));
      } else {
        g.add_circle(x, y);
      }
    }
  }
  res.skeleton = std::move(g).build();
  return res;
}

}  // namespace fciplus
