#pragma once

#include <deque>
#include <functional>
#include <set>
#include <utility>
#include <vector>

#include "fciplus/augment.hpp"
#include "fciplus/graph.hpp"
#include "fciplus/oracle.hpp"
#include "fciplus/possible_dsep.hpp"
#include "fciplus/sepset.hpp"

namespace fciplus {

// Candidate D-sep link: an x <-> y edge of the augmented skeleton with
// u <-> x and y <-> v, u != v, u and v nonadjacent.
struct PosDsepLink {
  VarId x;
  VarId y;
  VarId witness_u;  // u <-> x
  VarId witness_v;  // y <-> v

  friend bool operator==(const PosDsepLink&, const PosDsepLink&) = default;
};

// Only the bi-directed triple and the nonadjacency of its ends are checked;
// the accompanying path conditions are not, so the list over-approximates
// the true D-sep links. Ordered lexicographically by (x, y), x < y. The
// witnesses are the lexicographically first (u, v) found.
inline std::vector<PosDsepLink> find_possible_dsep_links(const MixedGraph& gplus) {
  std::vector<PosDsepLink> out;
  const int n = gplus.size();
  std::vector<VarSet> bi(static_cast<std::size_t>(n));
  for (VarId v = 0; v < n; ++v) {
    std::vector<VarId> ids;
    for (VarId w : gplus.neighbors(v))
      if (gplus.is_bidirected(v, w)) ids.push_back(w);
    bi[static_cast<std::size_t>(v)] = VarSet(std::move(ids));
  }
  for (const Edge& e : gplus.edges()) {
    if (e.mark_a != Mark::kArrow || e.mark_b != Mark::kArrow) continue;
    bool found = false;
    for (VarId u : bi[static_cast<std::size_t>(e.a)]) {
      if (u == e.b) continue;
      for (VarId v : bi[static_cast<std::size_t>(e.b)]) {
        if (v == e.a || v == u || gplus.adjacent(u, v)) continue;
        out.push_back({e.a, e.b, u, v});
        found = true;
        break;
      }
      if (found) break;
    }
  }
  return out;
}

struct Hierarchy {
  VarSet seed;
  VarSet closure;
};

// Least fixpoint: the seed plus every member of a stored separating set
// between two nodes already in the closure.
inline Hierarchy hie(const VarSet& seed, const SepsetMap& sepsets) {
  Hierarchy h{seed, seed};
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [pair, entry] : sepsets) {
      if (!h.closure.contains(pair.first) || !h.closure.contains(pair.second)) continue;
      if (entry.set.is_subset_of(h.closure)) continue;
      h.closure = h.closure | entry.set;
      changed = true;
    }
  }
  return h;
}

// Drops redundant nodes from a separating set: passes in ascending id order,
// removing any node whose absence keeps x and y separated, repeated until a
// pass removes nothing.
inline VarSet minimal_dsep(VarId x, VarId y, const VarSet& z_star, IndependenceOracle& oracle) {
  StageScope scope(oracle, Stage::kMinimalDsep);
  if (!oracle.query(x, y, z_star))
    throw InternalError("minimal_dsep called with a non-separating set " + to_string(z_star));
  VarSet z = z_star;
  bool removed = true;
  while (removed) {
    removed = false;
    for (VarId w : VarSet(z)) {
      const VarSet smaller = z.without(w);
      if (oracle.query(x, y, smaller)) {
        z = smaller;
        removed = true;
      }
    }
  }
  return z;
}

struct DsepSearchOptions {
  int k = 3;
  bool intersect_pdsep = false;
  // Called with the working graph and sepsets before the first link is
  // taken and after every resolution.
  std::function<void(const MixedGraph&, const SepsetMap&)> observer;
};

struct DsepAttempt {
  VarId x;
  VarId y;
  VarId witness_u;
  VarId witness_v;
  std::size_t combinations = 0;  // (Zx, Zy) bases examined
  bool resolved = false;
  VarSet base;                   // Zx + Zy of the successful combination
  VarSet hierarchy;              // its hierarchy minus {x, y}
  VarSet separator;              // minimal separator when resolved
  bool used_intersection = false;
};

struct DsepSearchLog {
  std::vector<std::pair<VarId, VarId>> initial_links;
  std::vector<DsepAttempt> attempts;
  std::size_t resolutions = 0;
  std::size_t reactivations = 0;
};

struct DsepSearchResult {
  MixedGraph gplus;
  SepsetMap sepsets;
  DsepSearchLog log;
};

// Processes candidate D-sep links until none is pending. For each link the
// bases Zx in Adj(x)\y and Zy in Adj(y)\x of sizes 0..k (size of Zx outer,
// Zy inner, lexicographic within a size) seed a hierarchy; the hierarchy minus
// {x, y} is tested as a separator. On success the separator is minimalized
// and stored, the edge removed, the skeleton re-augmented, and the candidate
// list rebuilt, which re-activates links that failed earlier.
inline DsepSearchResult dsep_search(MixedGraph gplus, SepsetMap sepsets, IndependenceOracle& oracle,
                                    const DsepSearchOptions& opt = {}) {
  if (opt.k < 0) throw InputError("degree bound k must be non-negative");
  DsepSearchResult res;
  std::deque<PosDsepLink> pending;
  for (const PosDsepLink& l : find_possible_dsep_links(gplus)) {
    pending.push_back(l);
    res.log.initial_links.emplace_back(l.x, l.y);
  }
  std::set<std::pair<VarId, VarId>> tried_failed;
  std::set<std::pair<VarId, VarId>> resolved;
  if (opt.observer) opt.observer(gplus, sepsets);

  while (!pending.empty()) {
    const PosDsepLink link = pending.front();
    pending.pop_front();
    if (!gplus.adjacent(link.x, link.y)) continue;
    const VarId x = link.x, y = link.y;

    DsepAttempt attempt{x, y, link.witness_u, link.witness_v, 0, false, {}, {}, {}, false};
    const VarSet base_x = gplus.neighbors(x).without(y);
    const VarSet base_y = gplus.neighbors(y).without(x);
    VarSet pds;
    if (opt.intersect_pdsep) pds = possible_dsep(gplus, x, y) | possible_dsep(gplus, y, x);

    std::set<VarSet> tested;
    std::optional<VarSet> separator;
    {
      StageScope scope(oracle, Stage::kDsepSearch);
      auto try_set = [&](const VarSet& z) {
        if (!tested.insert(z).second) return false;
        return oracle.query(x, y, z);
      };
      for (int nx = 0; nx <= opt.k && !separator; ++nx) {
        for (int ny = 0; ny <= opt.k && !separator; ++ny) {
          for_each_subset(base_x, static_cast<std::size_t>(nx), [&](const VarSet& zx) {
            return for_each_subset(base_y, static_cast<std::size_t>(ny), [&](const VarSet& zy) {
              ++attempt.combinations;
              const VarSet z_star = hie(zx | zy | VarSet{x, y}, sepsets).closure - VarSet{x, y};
              if (opt.intersect_pdsep) {
                const VarSet narrowed = z_star & pds;
                if (try_set(narrowed)) {
                  separator = narrowed;
                  attempt.used_intersection = true;
                }
              }
              if (!separator && try_set(z_star)) separator = z_star;
              if (separator) {
                attempt.base = zx | zy;
                attempt.hierarchy = z_star;
              }
              return separator.has_value();
            });
          });
        }
      }
    }

    if (!separator) {
      tried_failed.insert({x, y});
      res.log.attempts.push_back(std::move(attempt));
      continue;
    }

    if (!resolved.insert({x, y}).second) throw InternalError("D-sep link resolved twice");
    const VarSet z = minimal_dsep(x, y, *separator, oracle);
    sepsets.set(x, y, z, static_cast<int>(z.size()), SepsetMap::Origin::kDsep);
    gplus = gplus.edit().remove_edge(x, y).build();
    gplus = augment_graph(gplus, sepsets, oracle);

    attempt.resolved = true;
    attempt.separator = z;
    res.log.attempts.push_back(std::move(attempt));
    ++res.log.resolutions;

    if (opt.observer) opt.observer(gplus, sepsets);
    pending.clear();
    for (const PosDsepLink& l : find_possible_dsep_links(gplus)) {
      if (tried_failed.count({l.x, l.y})) ++res.log.reactivations;
      pending.push_back(l);
    }
    tried_failed.clear();
  }

  res.gplus = std::move(gplus);
  res.sepsets = std::move(sepsets);
  return res;
}

}  // namespace fciplus
