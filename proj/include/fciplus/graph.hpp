#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fciplus/errors.hpp"
#include "fciplus/varset.hpp"

namespace fciplus {

// Endpoint mark of an edge. kNone marks an absent edge and never appears on a
// materialized edge.
enum class Mark : std::uint8_t { kNone = 0, kTail, kArrow, kCircle };

inline const char* mark_name(Mark m) {
  switch (m) {
    case Mark::kTail: return "tail";
    case Mark::kArrow: return "arrow";
    case Mark::kCircle: return "circle";
    case Mark::kNone: break;
  }
  return "none";
}

inline Mark parse_mark(const std::string& s) {
  if (s == "tail") return Mark::kTail;
  if (s == "arrow") return Mark::kArrow;
  if (s == "circle") return Mark::kCircle;
  throw InputError("unknown endpoint mark '" + s + "'");
}

struct Edge {
  VarId a;
  VarId b;
  Mark mark_a;  // mark at a
  Mark mark_b;  // mark at b

  friend bool operator==(const Edge&, const Edge&) = default;
};

class GraphBuilder;

// Mixed graph with per-endpoint marks. Immutable; edit through GraphBuilder.
class MixedGraph {
 public:
  MixedGraph() = default;
  explicit MixedGraph(int n, std::vector<std::string> names = {})
      : n_(n), marks_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), Mark::kNone),
        names_(std::move(names)) {
    if (n < 0) throw InputError("negative variable count");
    if (names_.empty()) {
      for (int i = 0; i < n; ++i) names_.push_back("V" + std::to_string(i));
    }
    if (static_cast<int>(names_.size()) != n) throw InputError("name table size does not match n");
  }

  int size() const { return n_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(VarId v) const { return names_[idx(v)]; }

  bool valid(VarId v) const { return v >= 0 && v < n_; }
  void check(VarId v) const {
    if (!valid(v)) throw InputError("unknown variable id " + std::to_string(v));
  }

  bool adjacent(VarId a, VarId b) const { return valid(a) && valid(b) && at(a, b) != Mark::kNone; }

  // Mark at `near` on the edge {near, far}; kNone when not adjacent.
  Mark mark(VarId near, VarId far) const { return at(near, far); }

  bool is_arrow(VarId near, VarId far) const { return at(near, far) == Mark::kArrow; }
  bool is_tail(VarId near, VarId far) const { return at(near, far) == Mark::kTail; }
  bool is_circle(VarId near, VarId far) const { return at(near, far) == Mark::kCircle; }

  // a -> b
  bool is_directed(VarId a, VarId b) const { return is_tail(a, b) && is_arrow(b, a); }
  // a <-> b
  bool is_bidirected(VarId a, VarId b) const { return is_arrow(a, b) && is_arrow(b, a); }
  // a - b
  bool is_undirected(VarId a, VarId b) const { return is_tail(a, b) && is_tail(b, a); }

  VarSet neighbors(VarId v) const {
    std::vector<VarId> out;
    for (VarId w = 0; w < n_; ++w)
      if (at(v, w) != Mark::kNone) out.push_back(w);
    return VarSet(std::move(out));
  }

  std::size_t degree(VarId v) const { return neighbors(v).size(); }

  std::size_t max_degree() const {
    std::size_t d = 0;
    for (VarId v = 0; v < n_; ++v) d = std::max(d, degree(v));
    return d;
  }

  VarSet parents(VarId v) const {
    std::vector<VarId> out;
    for (VarId w = 0; w < n_; ++w)
      if (is_directed(w, v)) out.push_back(w);
    return VarSet(std::move(out));
  }

  VarSet children(VarId v) const {
    std::vector<VarId> out;
    for (VarId w = 0; w < n_; ++w)
      if (is_directed(v, w)) out.push_back(w);
    return VarSet(std::move(out));
  }

  // Edges in lexicographic (min id, max id) order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (VarId a = 0; a < n_; ++a)
      for (VarId b = a + 1; b < n_; ++b)
        if (at(a, b) != Mark::kNone) out.push_back({a, b, at(a, b), at(b, a)});
    return out;
  }

  std::size_t edge_count() const {
    std::size_t c = 0;
    for (VarId a = 0; a < n_; ++a)
      for (VarId b = a + 1; b < n_; ++b) c += at(a, b) != Mark::kNone;
    return c;
  }

  // Same adjacencies, every mark replaced by a circle.
  MixedGraph skeleton() const;

  GraphBuilder edit() const&;

  // Marks and adjacencies only; names are labels.
  friend bool operator==(const MixedGraph& x, const MixedGraph& y) {
    return x.n_ == y.n_ && x.marks_ == y.marks_;
  }

 private:
  friend class GraphBuilder;

  std::size_t idx(VarId v) const { return static_cast<std::size_t>(v); }
  Mark at(VarId near, VarId far) const {
    return marks_[idx(near) * static_cast<std::size_t>(n_) + idx(far)];
  }
  Mark& at(VarId near, VarId far) {
    return marks_[idx(near) * static_cast<std::size_t>(n_) + idx(far)];
  }

  int n_ = 0;
  std::vector<Mark> marks_;
  std::vector<std::string> names_;
};

class GraphBuilder {
 public:
  explicit GraphBuilder(int n, std::vector<std::string> names = {}) : g_(n, std::move(names)) {}
  explicit GraphBuilder(MixedGraph g) : g_(std::move(g)) {}

  int size() const { return g_.size(); }
  const MixedGraph& view() const { return g_; }

  GraphBuilder& add_edge(VarId a, VarId b, Mark mark_a, Mark mark_b) {
    g_.check(a);
    g_.check(b);
    if (a == b) throw InputError("self-loop on variable " + std::to_string(a));
    if (mark_a == Mark::kNone || mark_b == Mark::kNone) throw InputError("edge endpoint without mark");
    g_.at(a, b) = mark_a;
    g_.at(b, a) = mark_b;
    return *this;
  }

  GraphBuilder& add_directed(VarId a, VarId b) { return add_edge(a, b, Mark::kTail, Mark::kArrow); }
  GraphBuilder& add_bidirected(VarId a, VarId b) { return add_edge(a, b, Mark::kArrow, Mark::kArrow); }
  GraphBuilder& add_undirected(VarId a, VarId b) { return add_edge(a, b, Mark::kTail, Mark::kTail); }
  GraphBuilder& add_circle(VarId a, VarId b) { return add_edge(a, b, Mark::kCircle, Mark::kCircle); }

  GraphBuilder& remove_edge(VarId a, VarId b) {
    g_.check(a);
    g_.check(b);
    g_.at(a, b) = Mark::kNone;
    g_.at(b, a) = Mark::kNone;
    return *this;
  }

  // Overwrites the mark at `near` on an existing edge.
  GraphBuilder& set_mark(VarId near, VarId far, Mark m) {
    if (!g_.adjacent(near, far)) throw InternalError("set_mark on absent edge");
    if (m == Mark::kNone) throw InternalError("set_mark with kNone");
    g_.at(near, far) = m;
    return *this;
  }

  // Places `m` at `near` unless already present. Only circles may change;
  // anything else is a model violation. Returns whether a mark changed.
  bool orient(VarId near, VarId far, Mark m) {
    const Mark cur = g_.mark(near, far);
    if (cur == m) return false;
    if (cur == Mark::kNone) throw InternalError("orient on absent edge");
    if (cur != Mark::kCircle) {
      throw ModelViolation("conflicting mark at " + g_.name(near) + " on edge " + g_.name(near) +
                           "-" + g_.name(far) + ": have " + mark_name(cur) + ", derived " +
                           mark_name(m));
    }
    g_.at(near, far) = m;
    return true;
  }

  MixedGraph build() && { return std::move(g_); }
  MixedGraph build() const& { return g_; }

 private:
  MixedGraph g_;
};

inline GraphBuilder MixedGraph::edit() const& { return GraphBuilder(*this); }

inline MixedGraph MixedGraph::skeleton() const {
  GraphBuilder b(n_, names_);
  for (const Edge& e : edges()) b.add_circle(e.a, e.b);
  return std::move(b).build();
}

enum class Role : std::uint8_t { kObserved, kLatent, kSelection };

// Ground-truth causal DAG over observed, latent and selection variables.
class CausalDag {
 public:
  CausalDag() = default;

  // Throws InputError on non-directed edges or cycles.
  CausalDag(MixedGraph g, std::vector<Role> roles) : g_(std::move(g)), roles_(std::move(roles)) {
    if (static_cast<int>(roles_.size()) != g_.size()) throw InputError("role table size does not match n");
    for (const Edge& e : g_.edges()) {
      const bool ab = e.mark_a == Mark::kTail && e.mark_b == Mark::kArrow;
      const bool ba = e.mark_a == Mark::kArrow && e.mark_b == Mark::kTail;
      if (!ab && !ba) throw InputError("causal DAG contains a non-directed edge " + g_.name(e.a) + "-" + g_.name(e.b));
    }
    parents_.resize(roles_.size());
    children_.resize(roles_.size());
    for (VarId v = 0; v < g_.size(); ++v) {
      parents_[static_cast<std::size_t>(v)] = g_.parents(v);
      children_[static_cast<std::size_t>(v)] = g_.children(v);
    }
    topo_ = topological_order();
    for (VarId v = 0; v < g_.size(); ++v) {
      switch (roles_[static_cast<std::size_t>(v)]) {
        case Role::kObserved: observed_.insert(v); break;
        case Role::kLatent: latent_.insert(v); break;
        case Role::kSelection: selection_.insert(v); break;
      }
    }
  }

  int size() const { return g_.size(); }
  const MixedGraph& graph() const { return g_; }
  const std::string& name(VarId v) const { return g_.name(v); }
  Role role(VarId v) const { return roles_.at(static_cast<std::size_t>(v)); }
  const std::vector<Role>& roles() const { return roles_; }

  const VarSet& parents(VarId v) const { return parents_.at(static_cast<std::size_t>(v)); }
  const VarSet& children(VarId v) const { return children_.at(static_cast<std::size_t>(v)); }

  const VarSet& observed() const { return observed_; }
  const VarSet& latent() const { return latent_; }
  const VarSet& selection() const { return selection_; }
  const std::vector<VarId>& topological() const { return topo_; }

  // Position of `v` among the observed variables, or -1.
  int observed_index(VarId v) const {
    auto it = std::lower_bound(observed_.begin(), observed_.end(), v);
    return (it != observed_.end() && *it == v) ? static_cast<int>(it - observed_.begin()) : -1;
  }

  friend bool operator==(const CausalDag& a, const CausalDag& b) {
    return a.g_ == b.g_ && a.roles_ == b.roles_;
  }

 private:
  std::vector<VarId> topological_order() const {
    std::vector<int> indeg(roles_.size(), 0);
    for (VarId v = 0; v < g_.size(); ++v) indeg[static_cast<std::size_t>(v)] = static_cast<int>(parents(v).size());
    std::vector<VarId> order;
    std::deque<VarId> ready;
    for (VarId v = 0; v < g_.size(); ++v)
      if (indeg[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
    while (!ready.empty()) {
      VarId v = ready.front();
      ready.pop_front();
      order.push_back(v);
      for (VarId c : children(v))
        if (--indeg[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
    }
    if (static_cast<int>(order.size()) != g_.size()) throw InputError("causal DAG contains a directed cycle");
    return order;
  }

  MixedGraph g_;
  std::vector<Role> roles_;
  std::vector<VarSet> parents_;
  std::vector<VarSet> children_;
  std::vector<VarId> topo_;
  VarSet observed_, latent_, selection_;
};

// xs together with every node that has a directed path into xs.
inline VarSet ancestors(const MixedGraph& g, const VarSet& xs) {
  for (VarId x : xs) g.check(x);
  std::vector<char> seen(static_cast<std::size_t>(g.size()), 0);
  std::vector<VarId> stack(xs.begin(), xs.end());
  for (VarId x : xs) seen[static_cast<std::size_t>(x)] = 1;
  while (!stack.empty()) {
    VarId v = stack.back();
    stack.pop_back();
    for (VarId w = 0; w < g.size(); ++w) {
      if (!seen[static_cast<std::size_t>(w)] && g.is_directed(w, v)) {
        seen[static_cast<std::size_t>(w)] = 1;
        stack.push_back(w);
      }
    }
  }
  std::vector<VarId> out;
  for (VarId v = 0; v < g.size(); ++v)
    if (seen[static_cast<std::size_t>(v)]) out.push_back(v);
  return VarSet(std::move(out));
}

inline VarSet ancestors(const CausalDag& dag, const VarSet& xs) {
  for (VarId x : xs) dag.graph().check(x);
  std::vector<char> seen(static_cast<std::size_t>(dag.size()), 0);
  std::vector<VarId> stack(xs.begin(), xs.end());
  for (VarId x : xs) seen[static_cast<std::size_t>(x)] = 1;
  while (!stack.empty()) {
    VarId v = stack.back();
    stack.pop_back();
    for (VarId p : dag.parents(v)) {
      if (!seen[static_cast<std::size_t>(p)]) {
        seen[static_cast<std::size_t>(p)] = 1;
        stack.push_back(p);
      }
    }
  }
  std::vector<VarId> out;
  for (VarId v = 0; v < dag.size(); ++v)
    if (seen[static_cast<std::size_t>(v)]) out.push_back(v);
  return VarSet(std::move(out));
}

namespace detail {

inline void check_separation_args(const MixedGraph& g, VarId x, VarId y, const VarSet& z) {
  g.check(x);
  g.check(y);
  for (VarId v : z) g.check(v);
  if (x == y) throw InputError("separation query with x == y");
  if (z.contains(x) || z.contains(y)) throw InputError("separation query with endpoint in conditioning set");
}

// Reachability over (vertex, arrived-with-arrowhead) states. A walk is
// m-connecting when every collider is an ancestor of z and every noncollider
// is outside z; walks and paths agree on this criterion.
inline bool m_connected_walk(const MixedGraph& g, VarId x, VarId y, const VarSet& z, const VarSet& an_z) {
  const int n = g.size();
  std::vector<char> visited(static_cast<std::size_t>(2 * n), 0);
  std::vector<std::pair<VarId, bool>> stack;
  auto push = [&](VarId v, bool arrow) {
    auto key = static_cast<std::size_t>(2 * v + (arrow ? 1 : 0));
    if (!visited[key]) {
      visited[key] = 1;
      stack.emplace_back(v, arrow);
    }
  };
  for (VarId w : g.neighbors(x)) push(w, g.is_arrow(w, x));
  while (!stack.empty()) {
    auto [v, arrived_arrow] = stack.back();
    stack.pop_back();
    if (v == y) return true;
    if (v == x) continue;
    const bool in_z = z.contains(v);
    const bool in_an = an_z.contains(v);
    for (VarId w = 0; w < n; ++w) {
      const Mark here = g.mark(v, w);
      if (here == Mark::kNone) continue;
      const bool collider = arrived_arrow && here == Mark::kArrow;
      if (collider ? !in_an : in_z) continue;
      push(w, g.is_arrow(w, v));
    }
  }
  return false;
}

}  // namespace detail

// Ancestrality check. Returns an explanation when `g` is not a valid
// ancestral graph (circle marks, directed or almost directed cycles, or
// arrowheads into nodes with undirected edges).
inline std::optional<std::string> ancestral_violation(const MixedGraph& g) {
  const int n = g.size();
  std::vector<VarSet> anc(static_cast<std::size_t>(n));
  for (VarId v = 0; v < n; ++v) anc[static_cast<std::size_t>(v)] = ancestors(g, VarSet{v});
  for (const Edge& e : g.edges()) {
    if (e.mark_a == Mark::kCircle || e.mark_b == Mark::kCircle)
      return "circle mark on " + g.name(e.a) + "-" + g.name(e.b);
    if (e.mark_a == Mark::kTail && e.mark_b == Mark::kArrow && anc[static_cast<std::size_t>(e.a)].contains(e.b))
      return "directed cycle through " + g.name(e.a) + "->" + g.name(e.b);
    if (e.mark_b == Mark::kTail && e.mark_a == Mark::kArrow && anc[static_cast<std::size_t>(e.b)].contains(e.a))
      return "directed cycle through " + g.name(e.b) + "->" + g.name(e.a);
    if (e.mark_a == Mark::kArrow && anc[static_cast<std::size_t>(e.b)].contains(e.a))
      return "arrowhead at ancestor " + g.name(e.a) + " on edge to " + g.name(e.b);
    if (e.mark_b == Mark::kArrow && anc[static_cast<std::size_t>(e.a)].contains(e.b))
      return "arrowhead at ancestor " + g.name(e.b) + " on edge to " + g.name(e.a);
  }
  for (VarId v = 0; v < n; ++v) {
    bool undirected = false, arrow = false;
    for (VarId w : g.neighbors(v)) {
      undirected |= g.is_undirected(v, w);
      arrow |= g.is_arrow(v, w);
    }
    if (undirected && arrow) return "arrowhead into " + g.name(v) + " which has an undirected edge";
  }
  return std::nullopt;
}

inline bool is_ancestral(const MixedGraph& g) { return !ancestral_violation(g).has_value(); }

inline bool d_separated(const CausalDag& dag, VarId x, VarId y, const VarSet& z) {
  detail::check_separation_args(dag.graph(), x, y, z);
  return !detail::m_connected_walk(dag.graph(), x, y, z, ancestors(dag, z));
}

// Unchecked variant for hot loops; the graph must already be known ancestral.
inline bool m_separated_unchecked(const MixedGraph& mag, VarId x, VarId y, const VarSet& z) {
  detail::check_separation_args(mag, x, y, z);
  return !detail::m_connected_walk(mag, x, y, z, ancestors(mag, z));
}

inline bool m_separated(const MixedGraph& mag, VarId x, VarId y, const VarSet& z) {
  if (auto why = ancestral_violation(mag)) throw InputError("m_separated on non-ancestral graph: " + *why);
  return m_separated_unchecked(mag, x, y, z);
}

// Projects a causal DAG onto its observed variables, producing the MAG.
// Adjacency is decided by inducing paths: walks whose noncolliders are latent
// and whose colliders are ancestors of the endpoints or the selection set.
// Variable i of the result is the i-th observed variable of `dag`.
inline MixedGraph latent_project(const CausalDag& dag) {
  const VarSet& obs = dag.observed();
  const VarSet& sel = dag.selection();
  const VarSet& lat = dag.latent();
  const MixedGraph& g = dag.graph();
  const int n = dag.size();

  std::vector<std::string> names;
  for (VarId v : obs) names.push_back(dag.name(v));
  GraphBuilder out(static_cast<int>(obs.size()), std::move(names));

  auto inducing = [&](VarId a, VarId b, const VarSet& an_abs) {
    std::vector<char> visited(static_cast<std::size_t>(2 * n), 0);
    std::vector<std::pair<VarId, bool>> stack;
    auto push = [&](VarId v, bool arrow) {
      auto key = static_cast<std::size_t>(2 * v + (arrow ? 1 : 0));
      if (!visited[key]) {
        visited[key] = 1;
        stack.emplace_back(v, arrow);
      }
    };
    for (VarId w : g.neighbors(a)) push(w, g.is_arrow(w, a));
    while (!stack.empty()) {
      auto [v, arrived_arrow] = stack.back();
      stack.pop_back();
      if (v == b) return true;
      if (v == a) continue;
      for (VarId w : g.neighbors(v)) {
        const bool collider = arrived_arrow && g.is_arrow(v, w);
        if (collider ? !an_abs.contains(v) : !lat.contains(v)) continue;
        push(w, g.is_arrow(w, v));
      }
    }
    return false;
  };

  for (std::size_t i = 0; i < obs.size(); ++i) {
    for (std::size_t j = i + 1; j < obs.size(); ++j) {
      const VarId a = obs[i], b = obs[j];
      const VarSet an_abs = ancestors(dag, VarSet{a, b} | sel);
      if (!inducing(a, b, an_abs)) continue;
      const Mark ma = ancestors(dag, sel.with(b)).contains(a) ? Mark::kTail : Mark::kArrow;
      const Mark mb = ancestors(dag, sel.with(a)).contains(b) ? Mark::kTail : Mark::kArrow;
      out.add_edge(static_cast<VarId>(i), static_cast<VarId>(j), ma, mb);
    }
  }
  MixedGraph mag = std::move(out).build();
  if (auto why = ancestral_violation(mag)) throw InternalError("latent projection is not ancestral: " + *why);
  return mag;
}

}  // namespace fciplus
