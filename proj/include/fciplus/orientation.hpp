#pragma once

#include <algorithm>
#include <array>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "fciplus/graph.hpp"
#include "fciplus/sepset.hpp"

namespace fciplus {

// Marks an arrowhead at z on both edges of every unshielded triple x *-* z *-* y
// whose middle node is missing from the stored separator of (x, y).
inline MixedGraph orient_v_structures(const MixedGraph& skeleton, const SepsetMap& sepsets) {
  GraphBuilder out = skeleton.edit();
  const int n = skeleton.size();
  for (VarId z = 0; z < n; ++z) {
    const VarSet adj = skeleton.neighbors(z);
    for (std::size_t i = 0; i < adj.size(); ++i) {
      for (std::size_t j = i + 1; j < adj.size(); ++j) {
        const VarId x = adj[i], y = adj[j];
        if (skeleton.adjacent(x, y)) continue;
        const VarSet* sep = sepsets.get(x, y);
        if (!sep) throw InputError("no separating set stored for nonadjacent pair " + skeleton.name(x) + "," + skeleton.name(y));
        if (sep->contains(z)) continue;
        out.orient(z, x, Mark::kArrow);
        out.orient(z, y, Mark::kArrow);
      }
    }
  }
  return std::move(out).build();
}

namespace detail {

// Applies the ten orientation rules for ancestral graphs with latent and
// selection variables. Each rule sweeps the whole graph and returns whether
// it changed any mark.
class RuleEngine {
 public:
  RuleEngine(GraphBuilder& b, const SepsetMap& sepsets) : b_(b), sepsets_(sepsets) {}

  bool apply(int rule) {
    switch (rule) {
      case 1: return r1();
      case 2: return r2();
      case 3: return r3();
      case 4: return r4();
      case 5: return r5();
      case 6: return r6();
      case 7: return r7();
      case 8: return r8();
      case 9: return r9();
      case 10: return r10();
    }
    throw InternalError("unknown orientation rule");
  }

 private:
  const MixedGraph& g() const { return b_.view(); }
  int n() const { return g().size(); }

  // mark at `near` is not an arrowhead and mark at `far` is not a tail
  bool potentially_directed(VarId near, VarId far) const {
    const Mark m_near = g().mark(near, far), m_far = g().mark(far, near);
    return m_near != Mark::kNone && m_near != Mark::kArrow && m_far != Mark::kTail;
  }

  // R1: a *-> b o-* c, a and c nonadjacent  =>  b -> c
  bool r1() {
    bool changed = false;
    for (VarId b = 0; b < n(); ++b) {
      for (VarId a : g().neighbors(b)) {
        if (!g().is_arrow(b, a)) continue;
        for (VarId c : g().neighbors(b)) {
          if (c == a || g().adjacent(a, c) || !g().is_circle(b, c)) continue;
          changed |= b_.orient(b, c, Mark::kTail);
          changed |= b_.orient(c, b, Mark::kArrow);
        }
      }
    }
    return changed;
  }

  // R2: a -> b *-> c  or  a *-> b -> c, with a *-o c  =>  a *-> c
  bool r2() {
    bool changed = false;
    for (VarId a = 0; a < n(); ++a) {
      for (VarId c : g().neighbors(a)) {
        if (!g().is_circle(c, a)) continue;
        for (VarId b : g().neighbors(a) & g().neighbors(c)) {
          const bool first = g().is_directed(a, b) && g().is_arrow(c, b);
          const bool second = g().is_arrow(b, a) && g().is_directed(b, c);
          if (first || second) {
            changed |= b_.orient(c, a, Mark::kArrow);
            break;
          }
        }
      }
    }
    return changed;
  }

  // R3: a *-> b <-* c, a *-o t o-* c, a and c nonadjacent, t *-o b  =>  t *-> b
  bool r3() {
    bool changed = false;
    for (VarId b = 0; b < n(); ++b) {
      const VarSet adj = g().neighbors(b);
      for (VarId t : adj) {
        if (!g().is_circle(b, t)) continue;
        for (std::size_t i = 0; i < adj.size(); ++i) {
          const VarId a = adj[i];
          if (a == t || !g().is_arrow(b, a) || !g().is_circle(t, a)) continue;
          bool fired = false;
          for (std::size_t j = i + 1; j < adj.size(); ++j) {
            const VarId c = adj[j];
            if (c == t || !g().is_arrow(b, c) || !g().is_circle(t, c) || g().adjacent(a, c)) continue;
            changed |= b_.orient(b, t, Mark::kArrow);
            fired = true;
            break;
          }
          if (fired) break;
        }
      }
    }
    return changed;
  }

  // Searches a discriminating path <t, ..., a, b, c> for b: every node
  // strictly between t and b is a collider on the path and a parent of c, and
  // t is not adjacent to c. Breadth-first from the nodes next to b, so the
  // first path found is a shortest one. Returns (t, a).
  std::optional<std::pair<VarId, VarId>> discriminating_path(VarId b, VarId c) const {
    for (VarId a : g().neighbors(b) & g().neighbors(c)) {
      if (!g().is_arrow(a, b) || !g().is_directed(a, c)) continue;
      std::vector<char> visited(static_cast<std::size_t>(n()), 0);
      visited[static_cast<std::size_t>(a)] = visited[static_cast<std::size_t>(b)] = visited[static_cast<std::size_t>(c)] = 1;
      std::deque<VarId> queue{a};
      while (!queue.empty()) {
        const VarId v = queue.front();
        queue.pop_front();
        for (VarId p : g().neighbors(v)) {
          if (visited[static_cast<std::size_t>(p)] || !g().is_arrow(v, p)) continue;
          // v is a collider on <p, v, next>
          if (!g().adjacent(p, c)) return std::make_pair(p, a);
          if (g().is_directed(p, c) && g().is_arrow(p, v)) {
            visited[static_cast<std::size_t>(p)] = 1;
            queue.push_back(p);
          }
        }
      }
    }
    return std::nullopt;
  }

  // R4: discriminating path <t, ..., a, b, c> with b o-* c. If b is in the
  // separator of (t, c) then b -> c, otherwise a <-> b <-> c.
  bool r4() {
    bool changed = false;
    for (VarId b = 0; b < n(); ++b) {
      for (VarId c : g().neighbors(b)) {
        if (!g().is_circle(b, c)) continue;
        auto found = discriminating_path(b, c);
        if (!found) continue;
        const auto [t, a] = *found;
        const VarSet* sep = sepsets_.get(t, c);
        if (!sep) throw InputError("no separating set stored for discriminating path ends " + g().name(t) + "," + g().name(c));
        if (sep->contains(b)) {
          changed |= b_.orient(b, c, Mark::kTail);
          changed |= b_.orient(c, b, Mark::kArrow);
        } else {
          changed |= b_.orient(b, a, Mark::kArrow);
          changed |= b_.orient(b, c, Mark::kArrow);
          changed |= b_.orient(c, b, Mark::kArrow);
        }
      }
    }
    return changed;
  }

  // Breadth-first search over edge states (prev, cur) for an uncovered path
  // <start, first, ..., target> whose edges all satisfy `step`. `end_ok(prev)`
  // decides whether arriving at target from prev completes the path; the
  // target is never passed through. Nodes in `blocked` are never entered.
  // Returns the node sequence, or empty.
  template <typename Step, typename EndOk>
  std::vector<VarId> uncovered_path(VarId start, VarId first, VarId target, const VarSet& blocked, Step step,
                                    EndOk end_ok) const {
    std::map<std::pair<VarId, VarId>, std::pair<VarId, VarId>> parent;
    std::deque<std::pair<VarId, VarId>> queue{{start, first}};
    parent[{start, first}] = {-1, -1};
    while (!queue.empty()) {
      const auto [u, v] = queue.front();
      queue.pop_front();
      if (v == target) {
        if (!end_ok(u)) continue;
        std::vector<VarId> path{v};
        for (std::pair<VarId, VarId> s{u, v}; s.first != -1; s = parent[s]) path.push_back(s.first);
        std::reverse(path.begin(), path.end());
        return path;
      }
      for (VarId w : g().neighbors(v)) {
        if (w == u || blocked.contains(w) || g().adjacent(u, w) || !step(v, w)) continue;
        if (!parent.emplace(std::make_pair(v, w), std::make_pair(u, v)).second) continue;
        queue.emplace_back(v, w);
      }
    }
    return {};
  }

  bool circle_edge(VarId x, VarId y) const { return g().is_circle(x, y) && g().is_circle(y, x); }

  // R5: a o-o b with an uncovered circle path <a, c, ..., d, b>, a and d
  // nonadjacent, b and c nonadjacent  =>  a - b and every path edge undirected
  bool r5() {
    bool changed = false;
    for (VarId a = 0; a < n(); ++a) {
      for (VarId b : g().neighbors(a)) {
        if (b < a || !circle_edge(a, b)) continue;
        for (VarId c : g().neighbors(a)) {
          if (c == b || !circle_edge(a, c) || g().adjacent(b, c)) continue;
          auto path = uncovered_path(
              a, c, b, VarSet{a}, [&](VarId x, VarId y) { return circle_edge(x, y); },
              [&](VarId prev) { return !g().adjacent(a, prev); });
          if (path.empty()) continue;
          changed |= b_.orient(a, b, Mark::kTail);
          changed |= b_.orient(b, a, Mark::kTail);
          for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            changed |= b_.orient(path[i], path[i + 1], Mark::kTail);
            changed |= b_.orient(path[i + 1], path[i], Mark::kTail);
          }
          break;
        }
      }
    }
    return changed;
  }

  // R6: a - b o-* c  =>  b -* c
  bool r6() {
    bool changed = false;
    for (VarId b = 0; b < n(); ++b) {
      bool has_undirected = false;
      for (VarId a : g().neighbors(b)) has_undirected |= g().is_undirected(a, b);
      if (!has_undirected) continue;
      for (VarId c : g().neighbors(b))
        if (g().is_circle(b, c)) changed |= b_.orient(b, c, Mark::kTail);
    }
    return changed;
  }

  // R7: a -o b o-* c, a and c nonadjacent  =>  b -* c
  bool r7() {
    bool changed = false;
    for (VarId b = 0; b < n(); ++b) {
      for (VarId a : g().neighbors(b)) {
        if (!(g().is_tail(a, b) && g().is_circle(b, a))) continue;
        for (VarId c : g().neighbors(b)) {
          if (c == a || g().adjacent(a, c) || !g().is_circle(b, c)) continue;
          changed |= b_.orient(b, c, Mark::kTail);
        }
      }
    }
    return changed;
  }

  bool circle_arrow(VarId a, VarId c) const { return g().is_circle(a, c) && g().is_arrow(c, a); }

  // R8: a -> b -> c  or  a -o b -> c, with a o-> c  =>  a -> c
  bool r8() {
    bool changed = false;
    for (VarId a = 0; a < n(); ++a) {
      for (VarId c : g().neighbors(a)) {
        if (!circle_arrow(a, c)) continue;
        for (VarId b : g().neighbors(a) & g().neighbors(c)) {
          const bool first = g().is_tail(a, b) && (g().is_arrow(b, a) || g().is_circle(b, a));
          if (first && g().is_directed(b, c)) {
            changed |= b_.orient(a, c, Mark::kTail);
            break;
          }
        }
      }
    }
    return changed;
  }

  // R9: a o-> c with an uncovered potentially directed path <a, b, t, ..., c>,
  // b and c nonadjacent  =>  a -> c
  bool r9() {
    bool changed = false;
    for (VarId a = 0; a < n(); ++a) {
      for (VarId c : g().neighbors(a)) {
        if (!circle_arrow(a, c)) continue;
        for (VarId b : g().neighbors(a)) {
          if (b == c || g().adjacent(b, c) || !potentially_directed(a, b)) continue;
          auto path = uncovered_path(
              a, b, c, VarSet{a}, [&](VarId x, VarId y) { return potentially_directed(x, y); },
              [](VarId) { return true; });
          if (path.empty()) continue;
          changed |= b_.orient(a, c, Mark::kTail);
          break;
        }
      }
    }
    return changed;
  }

  // Nodes reachable from a by an uncovered potentially directed path whose
  // second node is m, avoiding `avoid`. Includes m itself.
  VarSet pd_reach(VarId a, VarId m, VarId avoid) const {
    std::vector<VarId> reached{m};
    std::set<std::pair<VarId, VarId>> seen{{a, m}};
    std::deque<std::pair<VarId, VarId>> queue{{a, m}};
    while (!queue.empty()) {
      const auto [u, v] = queue.front();
      queue.pop_front();
      for (VarId w : g().neighbors(v)) {
        if (w == u || w == a || w == avoid || g().adjacent(u, w) || !potentially_directed(v, w)) continue;
        if (!seen.insert({v, w}).second) continue;
        reached.push_back(w);
        queue.emplace_back(v, w);
      }
    }
    return VarSet(std::move(reached));
  }

  // R10: a o-> c, b -> c <- t, uncovered p.d. paths p1 from a to b and p2 from
  // a to t whose second nodes m and w are distinct and nonadjacent  =>  a -> c
  bool r10() {
    bool changed = false;
    for (VarId a = 0; a < n(); ++a) {
      for (VarId c : g().neighbors(a)) {
        if (!circle_arrow(a, c)) continue;
        std::vector<VarId> into_c;
        for (VarId p : g().neighbors(c))
          if (p != a && g().is_directed(p, c)) into_c.push_back(p);
        if (into_c.size() < 2) continue;
        std::vector<std::pair<VarId, VarSet>> firsts;
        for (VarId m : g().neighbors(a))
          if (m != c && potentially_directed(a, m)) firsts.emplace_back(m, pd_reach(a, m, c));
        bool fired = false;
        for (std::size_t i = 0; i < into_c.size() && !fired; ++i) {
          for (std::size_t j = 0; j < into_c.size() && !fired; ++j) {
            if (i == j) continue;
            const VarId b = into_c[i], t = into_c[j];
            for (const auto& [m, reach_m] : firsts) {
              if (!reach_m.contains(b)) continue;
              for (const auto& [w, reach_w] : firsts) {
                if (w == m || g().adjacent(m, w) || !reach_w.contains(t)) continue;
                fired = true;
                break;
              }
              if (fired) break;
            }
          }
        }
        if (fired) changed |= b_.orient(a, c, Mark::kTail);
      }
    }
    return changed;
  }

  GraphBuilder& b_;
  const SepsetMap& sepsets_;
};

}  // namespace detail

inline constexpr std::array<int, 10> kDefaultRuleOrder = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

// Runs the orientation rules in round-robin sweeps until a full sweep changes
// nothing. Only circles change; a rule deriving the opposite of an existing
// mark raises ModelViolation.
inline MixedGraph apply_fci_rules(const MixedGraph& pag, const SepsetMap& sepsets,
                                  const std::array<int, 10>& order = kDefaultRuleOrder) {
  GraphBuilder b = pag.edit();
  detail::RuleEngine engine(b, sepsets);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int rule : order) changed |= engine.apply(rule);
  }
  return std::move(b).build();
}

// Full orientation phase: unshielded colliders, then the rule set.
inline MixedGraph orient_pag(const MixedGraph& g, const SepsetMap& sepsets,
                             const std::array<int, 10>& order = kDefaultRuleOrder) {
  return apply_fci_rules(orient_v_structures(g, sepsets), sepsets, order);
}

}  // namespace fciplus
