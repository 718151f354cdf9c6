#pragma once

// Test-only oracles. Everything here is deliberately naive (path enumeration,
// subset enumeration, transitive closure by matrix) and shares no code with
// the library's search routines beyond the graph containers.

#include <algorithm>
#include <functional>
#include <random>
#include <vector>

#include "fciplus/graph.hpp"

namespace fciplus::testing {

// anc[i][j] == true iff i is an ancestor of j (reflexive), via Warshall.
inline std::vector<std::vector<bool>> ancestor_matrix(const MixedGraph& g) {
  const int n = g.size();
  std::vector<std::vector<bool>> anc(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
  for (int i = 0; i < n; ++i) {
    anc[i][i] = true;
    for (int j = 0; j < n; ++j)
      if (g.is_directed(i, j)) anc[i][j] = true;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (anc[i][k] && anc[k][j]) anc[i][j] = true;
  return anc;
}

// True iff some simple path between x and y is m-connecting given z.
inline bool connected_by_path_enumeration(const MixedGraph& g, VarId x, VarId y, const VarSet& z) {
  const int n = g.size();
  const auto anc = ancestor_matrix(g);
  auto in_an_z = [&](VarId v) {
    for (VarId w : z)
      if (anc[v][w]) return true;
    return false;
  };
  std::vector<VarId> path{x};
  std::vector<bool> on_path(static_cast<std::size_t>(n), false);
  on_path[x] = true;
  std::function<bool()> dfs = [&]() -> bool {
    const VarId v = path.back();
    for (VarId w = 0; w < n; ++w) {
      if (!g.adjacent(v, w) || on_path[w]) continue;
      if (path.size() >= 2) {
        const VarId u = path[path.size() - 2];
        const bool collider = g.is_arrow(v, u) && g.is_arrow(v, w);
        if (collider ? !in_an_z(v) : z.contains(v)) continue;
      }
      if (w == y) return true;
      path.push_back(w);
      on_path[w] = true;
      const bool hit = dfs();
      on_path[w] = false;
      path.pop_back();
      if (hit) return true;
    }
    return false;
  };
  return dfs();
}

// Every subset of `candidates`.
inline std::vector<VarSet> all_subsets(const VarSet& candidates) {
  std::vector<VarSet> out;
  const std::size_t m = candidates.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    std::vector<VarId> ids;
    for (std::size_t i = 0; i < m; ++i)
      if (mask & (std::size_t{1} << i)) ids.push_back(candidates[i]);
    out.emplace_back(std::move(ids));
  }
  return out;
}

// Adjacency in the projected MAG by definition: no W within the observed set
// separates a and b given W plus the selection set.
inline bool inseparable_by_definition(const CausalDag& dag, VarId a, VarId b) {
  const VarSet others = dag.observed() - VarSet{a, b};
  for (const VarSet& w : all_subsets(others))
    if (!connected_by_path_enumeration(dag.graph(), a, b, w | dag.selection())) return false;
  return true;
}

// Simple-path definition of Possible-D-SEP.
inline VarSet possible_dsep_by_paths(const MixedGraph& g, VarId a, VarId b) {
  const int n = g.size();
  std::vector<bool> reached(static_cast<std::size_t>(n), false);
  std::vector<VarId> path{a};
  std::vector<bool> on_path(static_cast<std::size_t>(n), false);
  on_path[a] = true;
  std::function<void()> dfs = [&]() {
    const VarId v = path.back();
    for (VarId w = 0; w < n; ++w) {
      if (!g.adjacent(v, w) || on_path[w]) continue;
      if (path.size() >= 2) {
        const VarId u = path[path.size() - 2];
        const bool collider = g.is_arrow(v, u) && g.is_arrow(v, w);
        if (!collider && !g.adjacent(u, w)) continue;
      }
      reached[w] = true;
      path.push_back(w);
      on_path[w] = true;
      dfs();
      on_path[w] = false;
      path.pop_back();
    }
  };
  dfs();
  std::vector<VarId> out;
  for (VarId v = 0; v < n; ++v)
    if (reached[v] && v != a && v != b) out.push_back(v);
  return VarSet(std::move(out));
}

// Random DAG over n_obs + n_lat + n_sel nodes. Latents are roots with two or
// three observed children; selection nodes are sinks with two observed parents.
inline CausalDag random_test_dag(std::mt19937_64& rng, int n_obs, int n_lat, int n_sel, double p) {
  const int n = n_obs + n_lat + n_sel;
  GraphBuilder b(n);
  std::vector<Role> roles(static_cast<std::size_t>(n), Role::kObserved);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> order(static_cast<std::size_t>(n_obs));
  for (int i = 0; i < n_obs; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  for (int i = 0; i < n_obs; ++i)
    for (int j = i + 1; j < n_obs; ++j)
      if (u(rng) < p) b.add_directed(order[i], order[j]);
  std::uniform_int_distribution<int> pick(0, std::max(0, n_obs - 1));
  for (int l = 0; l < n_lat; ++l) {
    const VarId id = n_obs + l;
    roles[id] = Role::kLatent;
    const int kids = (u(rng) < 0.5) ? 2 : 3;
    VarSet chosen;
    while (static_cast<int>(chosen.size()) < std::min(kids, n_obs)) chosen.insert(pick(rng));
    for (VarId c : chosen) b.add_directed(id, c);
  }
  for (int s = 0; s < n_sel; ++s) {
    const VarId id = n_obs + n_lat + s;
    roles[id] = Role::kSelection;
    VarSet chosen;
    while (static_cast<int>(chosen.size()) < std::min(2, n_obs)) chosen.insert(pick(rng));
    for (VarId c : chosen) b.add_directed(c, id);
  }
  return CausalDag(std::move(b).build(), std::move(roles));
}

// Fully random DAG with roles assigned at random positions; latent and
// selection nodes may sit anywhere in the order.
inline CausalDag random_general_dag(std::mt19937_64& rng, int n_obs, int n_lat, int n_sel, double p) {
  const int n = n_obs + n_lat + n_sel;
  std::vector<Role> roles;
  roles.insert(roles.end(), static_cast<std::size_t>(n_obs), Role::kObserved);
  roles.insert(roles.end(), static_cast<std::size_t>(n_lat), Role::kLatent);
  roles.insert(roles.end(), static_cast<std::size_t>(n_sel), Role::kSelection);
  std::shuffle(roles.begin(), roles.end(), rng);
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GraphBuilder b(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (u(rng) < p) b.add_directed(order[i], order[j]);
  return CausalDag(std::move(b).build(), std::move(roles));
}

}  // namespace fciplus::testing
