#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "fciplus/graph.hpp"

namespace fciplus {

enum class Stage : std::uint8_t { kPcSearch = 0, kAugment, kDsepSearch, kMinimalDsep, kOrientation, kReference };

inline constexpr std::size_t kStageCount = 6;

inline const char* stage_name(Stage s) {
  switch (s) {
    case Stage::kPcSearch: return "pc_search";
    case Stage::kAugment: return "augment";
    case Stage::kDsepSearch: return "dsep_search";
    case Stage::kMinimalDsep: return "minimal_dsep";
    case Stage::kOrientation: return "orientation";
    case Stage::kReference: return "reference";
  }
  return "unknown";
}

inline constexpr std::array<Stage, kStageCount> kAllStages = {
    Stage::kPcSearch, Stage::kAugment, Stage::kDsepSearch,
    Stage::kMinimalDsep, Stage::kOrientation, Stage::kReference};

struct StageCounters {
  std::size_t queries = 0;
  std::size_t distinct = 0;
  std::size_t max_cond_size = 0;

  friend bool operator==(const StageCounters&, const StageCounters&) = default;
};

// Query counters partitioned by pipeline stage. A query is "distinct" the
// first time its key is seen by the oracle, attributed to the stage that
// asked it, so distinct counts also sum to the oracle-wide total.
struct OracleStats {
  std::array<StageCounters, kStageCount> stages{};

  const StageCounters& operator[](Stage s) const { return stages[static_cast<std::size_t>(s)]; }
  StageCounters& operator[](Stage s) { return stages[static_cast<std::size_t>(s)]; }

  std::size_t total_queries() const {
    std::size_t t = 0;
    for (const auto& s : stages) t += s.queries;
    return t;
  }
  std::size_t total_distinct() const {
    std::size_t t = 0;
    for (const auto& s : stages) t += s.distinct;
    return t;
  }
  std::size_t max_cond_size() const {
    std::size_t m = 0;
    for (const auto& s : stages) m = std::max(m, s.max_cond_size);
    return m;
  }

  friend bool operator==(const OracleStats&, const OracleStats&) = default;
};

// Conditional independence oracle over variables 0..size()-1.
//
// query() is deterministic and symmetric in x and y. Every call is charged to
// the currently active stage. Answers are memoized by (min, max, z); with the
// memo disabled the backing test is re-run but the answer must not change.
class IndependenceOracle {
 public:
  virtual ~IndependenceOracle() = default;

  virtual int size() const = 0;

  // True when x and y are independent given z.
  bool query(VarId x, VarId y, const VarSet& z) {
    validate(x, y, z);
    Key key{std::min(x, y), std::max(x, y), z};
    StageCounters& c = stats_[stage_];
    ++c.queries;
    c.max_cond_size = std::max(c.max_cond_size, z.size());
    auto it = seen_.find(key);
    if (it == seen_.end()) {
      ++c.distinct;
      bool ans = test(key.x, key.y, z);
      seen_.emplace(std::move(key), ans);
      return ans;
    }
    if (memoize_) return it->second;
    if (test(key.x, key.y, z) != it->second) throw InternalError("oracle answer changed between identical queries");
    return it->second;
  }

  Stage stage() const { return stage_; }
  void set_stage(Stage s) { stage_ = s; }

  const OracleStats& stats() const { return stats_; }
  void reset_stats() {
    stats_ = {};
    seen_.clear();
  }

  void set_memoize(bool on) { memoize_ = on; }
  bool memoize() const { return memoize_; }

 protected:
  // Backing test, called with x < y.
  virtual bool test(VarId x, VarId y, const VarSet& z) = 0;

  virtual void validate(VarId x, VarId y, const VarSet& z) const {
    const int n = size();
    auto bad = [n](VarId v) { return v < 0 || v >= n; };
    if (bad(x) || bad(y)) throw InputError("oracle query on unknown variable");
    for (VarId v : z)
      if (bad(v)) throw InputError("oracle query conditions on unknown variable " + std::to_string(v));
    if (x == y) throw InputError("oracle query with x == y");
    if (z.contains(x) || z.contains(y)) throw InputError("oracle query with endpoint in conditioning set");
  }

 private:
  struct Key {
    VarId x;
    VarId y;
    VarSet z;
    friend bool operator<(const Key& a, const Key& b) {
      return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z);
    }
  };

  Stage stage_ = Stage::kPcSearch;
  OracleStats stats_;
  std::map<Key, bool> seen_;
  bool memoize_ = true;
};

// Sets the oracle's active stage for the lifetime of the guard.
class StageScope {
 public:
  StageScope(IndependenceOracle& o, Stage s) : oracle_(o), prev_(o.stage()) { o.set_stage(s); }
  ~StageScope() { oracle_.set_stage(prev_); }
  StageScope(const StageScope&) = delete;
  StageScope& operator=(const StageScope&) = delete;

 private:
  IndependenceOracle& oracle_;
  Stage prev_;
};

// Ground-truth oracle: d-separation in a causal DAG, conditioning implicitly
// on the selection variables. Queries use observed indices, i.e. variable i
// is the i-th observed node of the DAG (the same numbering latent_project uses).
class DsepOracle final : public IndependenceOracle {
 public:
  explicit DsepOracle(CausalDag dag) : dag_(std::move(dag)) {}

  int size() const override { return static_cast<int>(dag_.observed().size()); }
  const CausalDag& dag() const { return dag_; }

  // Maps an observed index to its DAG id.
  VarId dag_id(VarId observed_index) const { return dag_.observed()[static_cast<std::size_t>(observed_index)]; }

  VarSet to_dag(const VarSet& z) const {
    std::vector<VarId> ids;
    ids.reserve(z.size());
    for (VarId v : z) ids.push_back(dag_id(v));
    return VarSet(std::move(ids));
  }

 protected:
  bool test(VarId x, VarId y, const VarSet& z) override {
    return d_separated(dag_, dag_id(x), dag_id(y), to_dag(z) | dag_.selection());
  }

  void validate(VarId x, VarId y, const VarSet& z) const override {
    const int n = size();
    auto check = [&](VarId v) {
      if (v >= n && v < dag_.size())
        throw InputError("oracle query on non-observed variable index " + std::to_string(v));
    };
    check(x);
    check(y);
    for (VarId v : z) check(v);
    IndependenceOracle::validate(x, y, z);
  }

 private:
  CausalDag dag_;
};

}  // namespace fciplus
