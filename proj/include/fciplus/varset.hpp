#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace fciplus {

// Index into a run-scoped variable table. Ids are dense 0..n-1.
using VarId = int;

// Sorted, duplicate-free set of variable ids. Iteration is ascending.
class VarSet {
 public:
  using const_iterator = std::vector<VarId>::const_iterator;

  VarSet() = default;
  VarSet(std::initializer_list<VarId> ids) : ids_(ids) { normalize(); }
  explicit VarSet(std::vector<VarId> ids) : ids_(std::move(ids)) { normalize(); }

  template <typename It>
  VarSet(It first, It last) : ids_(first, last) {
    normalize();
  }

  bool contains(VarId v) const { return std::binary_search(ids_.begin(), ids_.end(), v); }
  bool empty() const { return ids_.empty(); }
  std::size_t size() const { return ids_.size(); }

  void insert(VarId v) {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), v);
    if (it == ids_.end() || *it != v) ids_.insert(it, v);
  }

  void erase(VarId v) {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), v);
    if (it != ids_.end() && *it == v) ids_.erase(it);
  }

  const_iterator begin() const { return ids_.begin(); }
  const_iterator end() const { return ids_.end(); }
  VarId operator[](std::size_t i) const { return ids_[i]; }
  VarId front() const { return ids_.front(); }
  VarId back() const { return ids_.back(); }

  const std::vector<VarId>& ids() const { return ids_; }
  std::span<const VarId> span() const { return ids_; }

  bool is_subset_of(const VarSet& other) const {
    return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(), ids_.end());
  }

  VarSet with(VarId v) const {
    VarSet r = *this;
    r.insert(v);
    return r;
  }

  VarSet without(VarId v) const {
    VarSet r = *this;
    r.erase(v);
    return r;
  }

  friend VarSet operator|(const VarSet& a, const VarSet& b) {
    VarSet r;
    r.ids_.reserve(a.size() + b.size());
    std::set_union(a.ids_.begin(), a.ids_.end(), b.ids_.begin(), b.ids_.end(),
                   std::back_inserter(r.ids_));
    return r;
  }

  friend VarSet operator&(const VarSet& a, const VarSet& b) {
    VarSet r;
    std::set_intersection(a.ids_.begin(), a.ids_.end(), b.ids_.begin(), b.ids_.end(),
                          std::back_inserter(r.ids_));
    return r;
  }

  friend VarSet operator-(const VarSet& a, const VarSet& b) {
    VarSet r;
    std::set_difference(a.ids_.begin(), a.ids_.end(), b.ids_.begin(), b.ids_.end(),
                        std::back_inserter(r.ids_));
    return r;
  }

  friend bool operator==(const VarSet&, const VarSet&) = default;
  friend auto operator<=>(const VarSet& a, const VarSet& b) { return a.ids_ <=> b.ids_; }

 private:
  void normalize() {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  }

  std::vector<VarId> ids_;
};

inline VarSet range_set(VarId n) {
  std::vector<VarId> ids(static_cast<std::size_t>(n));
  for (VarId i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
  return VarSet(std::move(ids));
}

inline std::string to_string(const VarSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s[i]);
  }
  return out + "}";
}

// Calls f(subset) for every subset of `base` of exactly `size` elements, in
// lexicographic order of positions. Stops early when f returns true; returns
// whether it stopped early.
template <typename F>
bool for_each_subset(const VarSet& base, std::size_t size, F&& f) {
  const std::size_t n = base.size();
  if (size > n) return false;
  std::vector<std::size_t> idx(size);
  for (std::size_t i = 0; i < size; ++i) idx[i] = i;
  std::vector<VarId> buf(size);
  while (true) {
    for (std::size_t i = 0; i < size; ++i) buf[i] = base[idx[i]];
    if (f(VarSet(buf))) return true;
    // advance
    std::size_t i = size;
    while (i > 0 && idx[i - 1] == n - size + i - 1) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// All subsets of `base` ordered by size, then lexicographically.
template <typename F>
bool for_each_subset_ascending(const VarSet& base, F&& f) {
  for (std::size_t s = 0; s <= base.size(); ++s) {
    if (for_each_subset(base, s, f)) return true;
  }
  return false;
}

}  // namespace fciplus
