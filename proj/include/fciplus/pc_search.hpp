#pragma once

#include <optional>

#include "fciplus/graph.hpp"
#include "fciplus/oracle.hpp"
#include "fciplus/sepset.hpp"

namespace fciplus {

struct AdjacencySearchResult {
  MixedGraph skeleton;  // all marks circle
  SepsetMap sepsets;
  int last_level = -1;  // highest conditioning size tested
};

// Level-wise adjacency search.
//
// At level n every still-adjacent pair (x, y), visited in lexicographic order,
// is tested against all size-n subsets of Adj(x)\y and then Adj(y)\x, taken
// from the adjacency snapshot at the start of the level. The first separating
// subset is stored and the edge removed. Levels stop when no node has more
// than n neighbours, or after level `max_level` when given.
inline AdjacencySearchResult pc_adjacency_search(IndependenceOracle& oracle,
                                                 std::optional<int> max_level = std::nullopt,
                                                 std::vector<std::string> names = {}) {
  StageScope scope(oracle, Stage::kPcSearch);
  const int n = oracle.size();
  if (max_level && *max_level < 0) throw InputError("degree bound k must be non-negative");

  GraphBuilder g(n, std::move(names));
  for (VarId a = 0; a < n; ++a)
    for (VarId b = a + 1; b < n; ++b) g.add_circle(a, b);

  AdjacencySearchResult res;
  for (int level = 0;; ++level) {
    if (max_level && level > *max_level) break;
    std::vector<VarSet> snapshot(static_cast<std::size_t>(n));
    bool any = false;
    for (VarId v = 0; v < n; ++v) {
      snapshot[static_cast<std::size_t>(v)] = g.view().neighbors(v);
      if (static_cast<int>(snapshot[static_cast<std::size_t>(v)].size()) > level) any = true;
    }
    if (!any) break;
    res.last_level = level;

    for (VarId x = 0; x < n; ++x) {
      for (VarId y = x + 1; y < n; ++y) {
        if (!g.view().adjacent(x, y)) continue;
        const VarSet base_x = snapshot[static_cast<std::size_t>(x)].without(y);
        const VarSet base_y = snapshot[static_cast<std::size_t>(y)].without(x);
        const auto size = static_cast<std::size_t>(level);
        std::optional<VarSet> found;
        for_each_subset(base_x, size, [&](const VarSet& z) {
          if (oracle.query(x, y, z)) found = z;
          return found.has_value();
        });
        if (!found) {
          // subsets of Adj(y) that were not already tried from the x side
          for_each_subset(base_y, size, [&](const VarSet& z) {
            if (z.is_subset_of(base_x)) return false;
            if (oracle.query(x, y, z)) found = z;
            return found.has_value();
          });
        }
        if (found) {
          res.sepsets.set(x, y, *found, level);
          g.remove_edge(x, y);
        }
      }
    }
  }
  res.skeleton = std::move(g).build();
  return res;
}

}  // namespace fciplus
