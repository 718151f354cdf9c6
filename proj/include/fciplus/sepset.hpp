#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>

#include "fciplus/varset.hpp"

namespace fciplus {

// One stored separating set per eliminated pair, with the search level (or
// stage-specific size) at which it was found.
class SepsetMap {
 public:
  // Which search produced an entry.
  enum class Origin : std::uint8_t { kPc, kDsep, kReference, kExhaustive };

  struct Entry {
    VarSet set;
    int level = 0;
    Origin origin = Origin::kPc;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  using Pair = std::pair<VarId, VarId>;

  static Pair key(VarId x, VarId y) { return {std::min(x, y), std::max(x, y)}; }

  void set(VarId x, VarId y, VarSet z, int level, Origin origin = Origin::kPc) {
    map_[key(x, y)] = Entry{std::move(z), level, origin};
  }
  void erase(VarId x, VarId y) { map_.erase(key(x, y)); }

  bool contains(VarId x, VarId y) const { return map_.count(key(x, y)) != 0; }

  const VarSet* get(VarId x, VarId y) const {
    auto it = map_.find(key(x, y));
    return it == map_.end() ? nullptr : &it->second.set;
  }

  std::optional<Entry> entry(VarId x, VarId y) const {
    auto it = map_.find(key(x, y));
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return map_.size(); }
  auto begin() const { return map_.begin(); }
  auto end() const { return map_.end(); }

  friend bool operator==(const SepsetMap&, const SepsetMap&) = default;

 private:
  std::map<Pair, Entry> map_;
};

}  // namespace fciplus
