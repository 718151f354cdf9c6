#pragma once

// Enumeration of every maximal ancestral graph on a small vertex set, grouped
// into Markov equivalence classes by their full m-separation model.

#include <cstdint>
#include <map>
#include <vector>

#include "fciplus/graph.hpp"
#include "support/brute_force.hpp"

namespace fciplus::testing {

// Edge state per unordered pair: none, a->b, b->a, a<->b, a--b.
inline MixedGraph graph_from_code(int n, std::uint64_t code) {
  GraphBuilder b(n);
  for (VarId a = 0; a < n; ++a) {
    for (VarId c = a + 1; c < n; ++c) {
      switch (code % 5) {
        case 1: b.add_directed(a, c); break;
        case 2: b.add_directed(c, a); break;
        case 3: b.add_bidirected(a, c); break;
        case 4: b.add_undirected(a, c); break;
        default: break;
      }
      code /= 5;
    }
  }
  return std::move(b).build();
}

// Bit per (pair, conditioning subset): 1 when m-separated.
inline std::vector<bool> separation_model(const MixedGraph& g) {
  std::vector<bool> bits;
  const int n = g.size();
  for (VarId a = 0; a < n; ++a)
    for (VarId c = a + 1; c < n; ++c)
      for (const VarSet& z : all_subsets(range_set(n) - VarSet{a, c})) bits.push_back(m_separated_unchecked(g, a, c, z));
  return bits;
}

// Every nonadjacent pair has some m-separating set.
inline bool is_maximal(const MixedGraph& g) {
  const int n = g.size();
  for (VarId a = 0; a < n; ++a) {
    for (VarId c = a + 1; c < n; ++c) {
      if (g.adjacent(a, c)) continue;
      bool sep = false;
      for (const VarSet& z : all_subsets(range_set(n) - VarSet{a, c}))
        if (m_separated_unchecked(g, a, c, z)) {
          sep = true;
          break;
        }
      if (!sep) return false;
    }
  }
  return true;
}

struct EquivalenceClasses {
  std::vector<MixedGraph> mags;
  std::vector<std::size_t> class_of;          // index into classes, per mag
  std::vector<std::vector<std::size_t>> classes;
};

inline EquivalenceClasses enumerate_mags(int n) {
  std::uint64_t total = 1;
  for (int i = 0; i < n * (n - 1) / 2; ++i) total *= 5;
  EquivalenceClasses out;
  std::map<std::vector<bool>, std::size_t> index;
  for (std::uint64_t code = 0; code < total; ++code) {
    MixedGraph g = graph_from_code(n, code);
    if (!is_ancestral(g) || !is_maximal(g)) continue;
    auto [it, fresh] = index.emplace(separation_model(g), out.classes.size());
    if (fresh) out.classes.emplace_back();
    out.classes[it->second].push_back(out.mags.size());
    out.class_of.push_back(it->second);
    out.mags.push_back(std::move(g));
  }
  return out;
}

// Marks shared by every member of a class; circles elsewhere. Members share
// the skeleton by maximality.
inline MixedGraph invariant_marks(const EquivalenceClasses& ec, std::size_t cls) {
  const auto& members = ec.classes[cls];
  const MixedGraph& first = ec.mags[members.front()];
  GraphBuilder b(first.size());
  for (const Edge& e : first.edges()) {
    Mark ma = e.mark_a, mb = e.mark_b;
    for (std::size_t m : members) {
      const MixedGraph& g = ec.mags[m];
      if (g.mark(e.a, e.b) != ma) ma = Mark::kCircle;
      if (g.mark(e.b, e.a) != mb) mb = Mark::kCircle;
    }
    b.add_edge(e.a, e.b, ma, mb);
  }
  return std::move(b).build();
}

// DAG realizing a MAG: directed edges kept, a <-> b through a latent parent,
// a -- b through a selected common child.
inline CausalDag canonical_dag(const MixedGraph& mag) {
  const int n = mag.size();
  std::vector<std::pair<VarId, VarId>> extra_lat, extra_sel;
  for (const Edge& e : mag.edges()) {
    if (mag.is_bidirected(e.a, e.b)) extra_lat.emplace_back(e.a, e.b);
    if (mag.is_undirected(e.a, e.b)) extra_sel.emplace_back(e.a, e.b);
  }
  const int total = n + static_cast<int>(extra_lat.size() + extra_sel.size());
  GraphBuilder b(total);
  std::vector<Role> roles(static_cast<std::size_t>(total), Role::kObserved);
  for (const Edge& e : mag.edges()) {
    if (mag.is_directed(e.a, e.b)) b.add_directed(e.a, e.b);
    if (mag.is_directed(e.b, e.a)) b.add_directed(e.b, e.a);
  }
  VarId next = n;
  for (auto [a, c] : extra_lat) {
    roles[static_cast<std::size_t>(next)] = Role::kLatent;
    b.add_directed(next, a).add_directed(next, c);
    ++next;
  }
  for (auto [a, c] : extra_sel) {
    roles[static_cast<std::size_t>(next)] = Role::kSelection;
    b.add_directed(a, next).add_directed(c, next);
    ++next;
  }
  return CausalDag(std::move(b).build(), std::move(roles));
}

}  // namespace fciplus::testing
