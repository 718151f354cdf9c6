#pragma once

#include "fciplus/graph.hpp"
#include "fciplus/oracle.hpp"
#include "fciplus/sepset.hpp"

namespace fciplus {

// Adds the invariant arrowheads implied by single-node minimal dependencies.
//
// For each nonadjacent pair (x, y) with stored separator z, every candidate w
// outside z + {x, y} that is adjacent to some node of {x, y} + z is tested:
// if x and y become dependent given z + w, then w is not an ancestor of
// {x, y} + z (or of the selection set), so an arrowhead goes at w on each of
// its edges into {x, y} + z. Arrowheads are never removed and tails are never
// placed. Candidates come from the adjacencies of `g` as passed in.
inline MixedGraph augment_graph(const MixedGraph& g, const SepsetMap& sepsets, IndependenceOracle& oracle) {
  StageScope scope(oracle, Stage::kAugment);
  GraphBuilder out = g.edit();
  const int n = g.size();
  for (const auto& [pair, entry] : sepsets) {
    const auto [x, y] = pair;
    if (g.adjacent(x, y)) continue;
    const VarSet anchor = entry.set | VarSet{x, y};
    for (VarId w = 0; w < n; ++w) {
      if (anchor.contains(w)) continue;
      const VarSet touching = g.neighbors(w) & anchor;
      if (touching.empty()) continue;
      if (oracle.query(x, y, entry.set.with(w))) continue;
      for (VarId v : touching) out.orient(w, v, Mark::kArrow);
    }
  }
  return std::move(out).build();
}

}  // namespace fciplus
