#pragma once

#include <vector>

#include "fciplus/graph.hpp"

namespace fciplus {

namespace detail {

// Path step u - v - w is admissible when v is a collider or u, w are adjacent.
inline bool pds_step(const MixedGraph& g, VarId u, VarId v, VarId w) {
  return (g.is_arrow(v, u) && g.is_arrow(v, w)) || g.adjacent(u, w);
}

// Nodes reachable from a along admissible walks, by search over directed
// edge states. A superset of the simple-path answer.
inline std::vector<char> pds_walk_reach(const MixedGraph& g, VarId a) {
  const auto un = static_cast<std::size_t>(g.size());
  std::vector<char> seen_state(un * un, 0);
  std::vector<char> reached(un, 0);
  std::vector<std::pair<VarId, VarId>> stack;
  for (VarId w : g.neighbors(a)) {
    seen_state[static_cast<std::size_t>(a) * un + static_cast<std::size_t>(w)] = 1;
    reached[static_cast<std::size_t>(w)] = 1;
    stack.emplace_back(a, w);
  }
  while (!stack.empty()) {
    auto [u, v] = stack.back();
    stack.pop_back();
    for (VarId w : g.neighbors(v)) {
      if (w == u || w == a || !pds_step(g, u, v, w)) continue;
      auto key = static_cast<std::size_t>(v) * un + static_cast<std::size_t>(w);
      if (seen_state[key]) continue;
      seen_state[key] = 1;
      reached[static_cast<std::size_t>(w)] = 1;
      stack.emplace_back(v, w);
    }
  }
  return reached;
}

}  // namespace detail

// Possible-D-SEP(a, b): nodes v (other than a and b) at the end of a simple
// path from a on which every intermediate node is a collider or sits in a
// triangle with its two path neighbours. Depth-first over simple paths; the
// walk search bounds the answer so the enumeration stops as soon as every
// walk-reachable node has been confirmed.
inline VarSet possible_dsep(const MixedGraph& g, VarId a, VarId b) {
  g.check(a);
  g.check(b);
  const int n = g.size();
  const auto un = static_cast<std::size_t>(n);
  const std::vector<char> bound = detail::pds_walk_reach(g, a);
  std::size_t pending = 0;
  for (char c : bound) pending += c ? 1 : 0;

  std::vector<char> reached(un, 0), on_path(un, 0);
  std::vector<VarId> path{a};
  on_path[static_cast<std::size_t>(a)] = 1;
  // Explicit stack of (node, next neighbour index) frames.
  std::vector<std::pair<VarId, std::size_t>> frames{{a, 0}};
  while (!frames.empty() && pending > 0) {
    auto& [v, next] = frames.back();
    const VarSet& nb = g.neighbors(v);
    if (next >= nb.size()) {
      on_path[static_cast<std::size_t>(v)] = 0;
      path.pop_back();
      frames.pop_back();
      continue;
    }
    const VarId w = nb[next++];
    if (on_path[static_cast<std::size_t>(w)]) continue;
    if (path.size() >= 2 && !detail::pds_step(g, path[path.size() - 2], v, w)) continue;
    if (!reached[static_cast<std::size_t>(w)]) {
      reached[static_cast<std::size_t>(w)] = 1;
      --pending;
    }
    path.push_back(w);
    on_path[static_cast<std::size_t>(w)] = 1;
    frames.emplace_back(w, 0);
  }
  std::vector<VarId> out;
  for (VarId v = 0; v < n; ++v)
    if (reached[static_cast<std::size_t>(v)] && v != a && v != b) out.push_back(v);
  return VarSet(std::move(out));
}

}  // namespace fciplus
