#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "fciplus/dsep_plus.hpp"
#include "fciplus/graph.hpp"
#include "fciplus/oracle.hpp"
#include "fciplus/pc_search.hpp"

namespace fciplus {

struct GeneratorConfig {
  int n = 10;            // observed variables
  int k = 3;             // bound on the projected MAG's node degree
  int latents = 0;
  int selection = 0;
  double density = 0.2;  // per-pair edge probability in the full DAG
  std::uint64_t seed = 1;
  int max_attempts = 20000;
  // Planted D-sep gadgets. Each takes two of the latents and five observed
  // nodes z < u < v < x < y (topological positions) and adds
  // z -> u, z -> v, u -> y, v -> x, x <- L -> u, y <- L' -> v.
  // Draws are kept only if the adjacency search leaves a spurious edge.
  int dsep_gadgets = 0;
};

namespace detail {

// Picks `count` nodes with degree (by `deg`) at least 2, highest first, ties
// broken by a random key. Returns false when there are too few.
inline bool pick_high_degree(const std::vector<int>& deg, std::vector<char>& taken, int count, std::mt19937_64& rng,
                             std::vector<VarId>& out) {
  std::vector<VarId> cand;
  for (VarId v = 0; v < static_cast<VarId>(deg.size()); ++v)
    if (!taken[static_cast<std::size_t>(v)] && deg[static_cast<std::size_t>(v)] >= 2) cand.push_back(v);
  if (static_cast<int>(cand.size()) < count) return false;
  std::vector<std::uint64_t> tie(cand.size());
  for (auto& t : tie) t = rng();
  std::vector<std::size_t> idx(cand.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const int da = deg[static_cast<std::size_t>(cand[a])], db = deg[static_cast<std::size_t>(cand[b])];
    return da != db ? da > db : tie[a] < tie[b];
  });
  for (int i = 0; i < count; ++i) {
    const VarId v = cand[idx[static_cast<std::size_t>(i)]];
    taken[static_cast<std::size_t>(v)] = 1;
    out.push_back(v);
  }
  return true;
}

}  // namespace detail

// Random DAG over n observed plus the requested latent and selection nodes,
// redrawn until the projected MAG has degree at most k. Latents are taken
// from the nodes with most children, selection nodes from those with most
// parents. Observed nodes are named X0.., latents L0.., selection S0..
inline CausalDag random_sparse_dag(const GeneratorConfig& cfg) {
  if (cfg.n < 2) throw InputError("generator needs n >= 2");
  if (cfg.k < 1) throw InputError("generator needs k >= 1");
  if (cfg.latents < 0 || cfg.selection < 0) throw InputError("latent and selection counts must be non-negative");
  if (!(cfg.density > 0.0 && cfg.density <= 1.0)) throw InputError("density must lie in (0, 1]");

  if (cfg.dsep_gadgets < 0 || 2 * cfg.dsep_gadgets > cfg.latents)
    throw InputError("each D-sep gadget needs two latents");
  if (cfg.n < 5 * cfg.dsep_gadgets) throw InputError("each D-sep gadget needs five observed variables");

  const int free_latents = cfg.latents - 2 * cfg.dsep_gadgets;
  const int base = cfg.n + free_latents + cfg.selection;
  const int total = cfg.n + cfg.latents + cfg.selection;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::size_t worst_degree = 0;
  int short_of_candidates = 0;
  int gadget_misses = 0;

  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    std::vector<VarId> order(static_cast<std::size_t>(base));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::pair<VarId, VarId>> edges;
    std::vector<int> outdeg(static_cast<std::size_t>(total), 0), indeg(static_cast<std::size_t>(total), 0);
    for (int i = 0; i < base; ++i)
      for (int j = i + 1; j < base; ++j)
        if (coin(rng) < cfg.density) {
          edges.emplace_back(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
          ++outdeg[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
          ++indeg[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
        }

    std::vector<char> taken(static_cast<std::size_t>(total), 0);
    for (VarId v = base; v < total; ++v) taken[static_cast<std::size_t>(v)] = 1;
    std::vector<VarId> lat, sel;
    if (!detail::pick_high_degree(outdeg, taken, free_latents, rng, lat) ||
        !detail::pick_high_degree(indeg, taken, cfg.selection, rng, sel)) {
      ++short_of_candidates;
      continue;
    }
    std::vector<Role> roles(static_cast<std::size_t>(total), Role::kObserved);
    for (VarId v : lat) roles[static_cast<std::size_t>(v)] = Role::kLatent;
    for (VarId v : sel) roles[static_cast<std::size_t>(v)] = Role::kSelection;
    if (cfg.dsep_gadgets > 0) {
      std::vector<int> pos(static_cast<std::size_t>(base));
      for (int i = 0; i < base; ++i) pos[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;
      std::vector<VarId> observed;
      for (VarId v = 0; v < base; ++v)
        if (roles[static_cast<std::size_t>(v)] == Role::kObserved) observed.push_back(v);
      std::shuffle(observed.begin(), observed.end(), rng);
      VarId next_latent = base;
      for (int gi = 0; gi < cfg.dsep_gadgets; ++gi) {
        std::vector<VarId> five(observed.begin() + 5 * gi, observed.begin() + 5 * gi + 5);
        std::sort(five.begin(), five.end(), [&](VarId a, VarId b) { return pos[static_cast<std::size_t>(a)] < pos[static_cast<std::size_t>(b)]; });
        const VarId z = five[0], u = five[1], v = five[2], x = five[3], y = five[4];
        std::erase_if(edges, [&](const std::pair<VarId, VarId>& e) {
          return (e.first == x && e.second == y) || (e.first == y && e.second == x);
        });
        for (auto e : {std::pair{z, u}, std::pair{z, v}, std::pair{u, y}, std::pair{v, x}})
          if (std::find(edges.begin(), edges.end(), e) == edges.end()) edges.push_back(e);
        for (auto [a, b] : {std::pair{x, u}, std::pair{y, v}}) {
          roles[static_cast<std::size_t>(next_latent)] = Role::kLatent;
          edges.emplace_back(next_latent, a);
          edges.emplace_back(next_latent, b);
          ++next_latent;
        }
      }
    }
    std::vector<std::string> names(static_cast<std::size_t>(total));
    int no = 0, nl = 0, ns = 0;
    for (VarId v = 0; v < total; ++v) {
      switch (roles[static_cast<std::size_t>(v)]) {
        case Role::kObserved: names[static_cast<std::size_t>(v)] = "X" + std::to_string(no++); break;
        case Role::kLatent: names[static_cast<std::size_t>(v)] = "L" + std::to_string(nl++); break;
        case Role::kSelection: names[static_cast<std::size_t>(v)] = "S" + std::to_string(ns++); break;
      }
    }
    GraphBuilder b(total, std::move(names));
    for (auto [from, to] : edges) b.add_directed(from, to);
    CausalDag dag(std::move(b).build(), std::move(roles));
    const MixedGraph mag = latent_project(dag);
    const std::size_t deg = mag.max_degree();
    if (deg > static_cast<std::size_t>(cfg.k)) {
      worst_degree = std::max(worst_degree, deg);
      continue;
    }
    if (cfg.dsep_gadgets > 0) {
      DsepOracle probe(dag);
      const MixedGraph skel = pc_adjacency_search(probe, cfg.k).skeleton;
      if (skel.edge_count() == mag.edge_count()) {
        ++gadget_misses;
        continue;
      }
    }
    return dag;
  }
  throw ConfigError("generator gave up after " + std::to_string(cfg.max_attempts) + " attempts (n=" +
                    std::to_string(cfg.n) + ", k=" + std::to_string(cfg.k) + ", density=" +
                    std::to_string(cfg.density) + "): " + std::to_string(short_of_candidates) +
                    " draws lacked latent/selection candidates, largest rejected MAG degree " +
                    std::to_string(worst_degree) + ", " + std::to_string(gadget_misses) +
                    " draws lost their planted D-sep link");
}

// A hand-reconstructed figure graph plus the independence facts it has to
// satisfy. Facts are phrased over observed names.
struct CanonicalExample {
  std::string name;
  CausalDag dag;
  int k = 3;  // degree bound to run with
  std::vector<std::string> facts;

  VarId var(const std::string& observed_name) const {
    const VarSet& obs = dag.observed();
    for (std::size_t i = 0; i < obs.size(); ++i)
      if (dag.name(obs[i]) == observed_name) return static_cast<VarId>(i);
    throw InputError("example " + name + " has no observed variable " + observed_name);
  }
  VarSet vars(std::initializer_list<const char*> ns) const {
    std::vector<VarId> ids;
    for (const char* s : ns) ids.push_back(var(s));
    return VarSet(std::move(ids));
  }
  std::vector<std::string> observed_names() const {
    std::vector<std::string> out;
    for (VarId v : dag.observed()) out.push_back(dag.name(v));
    return out;
  }
};

namespace detail {

struct FigureSpec {
  std::vector<std::string> observed;
  std::vector<std::pair<std::string, std::string>> directed;
  std::vector<std::pair<std::string, std::string>> confounded;  // via a latent parent
};

inline CausalDag build_figure(const FigureSpec& f) {
  const int n_obs = static_cast<int>(f.observed.size());
  const int total = n_obs + static_cast<int>(f.confounded.size());
  std::vector<std::string> names = f.observed;
  for (std::size_t i = 0; i < f.confounded.size(); ++i) names.push_back("L" + std::to_string(i + 1));
  auto id = [&](const std::string& s) {
    auto it = std::find(f.observed.begin(), f.observed.end(), s);
    if (it == f.observed.end()) throw InternalError("figure refers to unknown node " + s);
    return static_cast<VarId>(it - f.observed.begin());
  };
  GraphBuilder b(total, std::move(names));
  std::vector<Role> roles(static_cast<std::size_t>(total), Role::kObserved);
  for (const auto& [a, c] : f.directed) b.add_directed(id(a), id(c));
  for (std::size_t i = 0; i < f.confounded.size(); ++i) {
    const VarId l = n_obs + static_cast<VarId>(i);
    roles[static_cast<std::size_t>(l)] = Role::kLatent;
    b.add_directed(l, id(f.confounded[i].first));
    b.add_directed(l, id(f.confounded[i].second));
  }
  return CausalDag(std::move(b).build(), std::move(roles));
}

inline bool separates_minimally(IndependenceOracle& o, VarId x, VarId y, const VarSet& z) {
  if (!o.query(x, y, z)) return false;
  return !for_each_subset_ascending(z, [&](const VarSet& s) { return s.size() < z.size() && o.query(x, y, s); });
}

// Every separating set contains a node outside Adj(x) + Adj(y) of the MAG.
inline bool is_dsep_link(IndependenceOracle& o, const MixedGraph& mag, VarId x, VarId y) {
  if (mag.adjacent(x, y)) return false;
  const VarSet adj = (mag.neighbors(x) | mag.neighbors(y)) - VarSet{x, y};
  return !for_each_subset_ascending(adj, [&](const VarSet& s) { return o.query(x, y, s); });
}

}  // namespace detail

// Checks an example's facts against its own d-separation oracle; throws
// ConfigError naming the first violated fact.
inline void validate_example(const CanonicalExample& ex) {
  DsepOracle o(ex.dag);
  const MixedGraph mag = latent_project(ex.dag);
  auto require = [&](bool ok, const std::string& fact) {
    if (!ok) throw ConfigError("canonical example " + ex.name + " violates: " + fact);
  };
  auto v = [&](const char* s) { return ex.var(s); };
  if (mag.max_degree() > static_cast<std::size_t>(ex.k)) require(false, "MAG degree within k");

  if (ex.name == "figure4b") {
    require(o.query(v("X"), v("Y"), ex.vars({"U", "V", "Z"})), "X _||_ Y | {U,V,Z}");
    const VarSet adj = mag.neighbors(v("X")) | mag.neighbors(v("Y"));
    require(!adj.contains(v("Z")), "Z not adjacent to X or Y");
    require(detail::is_dsep_link(o, mag, v("X"), v("Y")), "no subset of Adj(X)+Adj(Y) separates X and Y");
  } else if (ex.name == "figure5") {
    require(detail::separates_minimally(o, v("X"), v("Z"), ex.vars({"S", "T", "W"})), "X _||_ Z | [S,T,W]");
    require(detail::separates_minimally(o, v("X"), v("Y"), ex.vars({"S", "T", "U", "V", "W", "Z"})),
            "X _||_ Y | [S,T,U,V,W,Z]");
    require(detail::is_dsep_link(o, mag, v("X"), v("Z")), "X - Z is a D-sep link");
    require(detail::is_dsep_link(o, mag, v("X"), v("Y")), "X - Y is a D-sep link");
    const VarSet rest = range_set(o.size()) - ex.vars({"X", "Z", "Y"});
    bool y_in_some = false;
    for (std::size_t size = 0; size <= rest.size() && !y_in_some; ++size) {
      for_each_subset(rest, size, [&](const VarSet& s) {
        if (detail::separates_minimally(o, v("X"), v("Z"), s.with(v("Y")))) y_in_some = true;
        return y_in_some;
      });
    }
    require(!y_in_some, "Y appears in no minimal separating set of X and Z");
  } else if (ex.name == "figure6") {
    require(detail::separates_minimally(o, v("X"), v("Y"), ex.vars({"S", "T", "U", "V", "Z1", "Z2", "Z3"})),
            "X _||_ Y | [S,T,U,V,Z1,Z2,Z3]");
    require(detail::separates_minimally(o, v("S"), v("Z1"), ex.vars({"Z3"})), "S _||_ Z1 | [Z3]");
    require(detail::is_dsep_link(o, mag, v("X"), v("Y")), "X - Y is a D-sep link");
    const AdjacencySearchResult pc = pc_adjacency_search(o, ex.k);
    require(hie(ex.vars({"X", "Y", "S", "T", "U", "V"}), pc.sepsets).closure.contains(v("Z3")),
            "Z3 in HIE({X,Y,S,T,U,V}) of the adjacency-search sepsets");
  } else {
    throw InternalError("no validator for example " + ex.name);
  }
}

inline std::vector<CanonicalExample> canonical_examples() {
  std::vector<CanonicalExample> out;
  out.push_back({"figure4b",
                 detail::build_figure({{"X", "Y", "U", "V", "Z"},
                                       {{"U", "Y"}, {"V", "X"}, {"Z", "U"}, {"Z", "V"}},
                                       {{"X", "U"}, {"Y", "V"}}}),
                 3,
                 {"X _||_ Y | {U,V,Z}", "Z not adjacent to X or Y",
                  "no subset of Adj(X)+Adj(Y) separates X and Y"}});
  out.push_back({"figure5",
                 detail::build_figure({{"X", "Y", "Z", "S", "T", "U", "V", "W"},
                                       {{"S", "Z"}, {"T", "X"}, {"W", "S"}, {"W", "T"}, {"Z", "Y"}, {"V", "X"},
                                        {"U", "Y"}, {"Z", "U"}},
                                       {{"X", "S"}, {"Z", "T"}, {"T", "Y"}, {"Y", "V"}, {"X", "U"}}}),
                 4,
                 {"X _||_ Z | [S,T,W]", "X _||_ Y | [S,T,U,V,W,Z]", "X - Z is a D-sep link",
                  "X - Y is a D-sep link", "Y appears in no minimal separating set of X and Z"}});
  out.push_back({"figure6",
                 detail::build_figure({{"X", "Y", "S", "T", "U", "V", "Z1", "Z2", "Z3", "W"},
                                       {{"S", "X"}, {"T", "W"}, {"U", "Z3"}, {"V", "Y"}, {"Z1", "X"},
                                        {"Z2", "Y"}, {"Z2", "T"}, {"Z2", "V"}, {"Z3", "Z1"}, {"W", "X"}},
                                       {{"X", "V"}, {"Y", "S"}, {"Y", "U"}, {"S", "U"}, {"T", "U"},
                                        {"T", "Z1"}, {"V", "Z3"}, {"Z3", "W"}}}),
                 4,
                 {"X _||_ Y | [S,T,U,V,Z1,Z2,Z3]", "S _||_ Z1 | [Z3]", "X - Y is a D-sep link",
                  "Z3 in HIE({X,Y,S,T,U,V}) of the adjacency-search sepsets"}});
  for (const CanonicalExample& ex : out) validate_example(ex);
  return out;
}

inline CanonicalExample canonical_example(const std::string& name) {
  for (CanonicalExample& ex : canonical_examples())
    if (ex.name == name) return std::move(ex);
  throw InputError("unknown canonical example " + name);
}

}  // namespace fciplus
