#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "xset/common.hpp"
#include "xset/fks.hpp"
#include "xset/ordered_set.hpp"

namespace xset {

struct StringSetConfig {
  double k = 2.5;  // heavy threshold is m^(1 - 1/k)
  SVariant sstruct = SVariant::automatic;
};

struct StringStats {
  std::uint64_t heavy_hits = 0, light_lookups = 0, heavy_rebuilds = 0;
  std::uint64_t max_visits = 0;  // trie nodes entered by one descent
  std::uint64_t last_visits = 0;
  std::uint64_t last_lcp = 0;
};

struct StringAudit {
  std::vector<std::string> violations;
  std::uint64_t coverage_violations = 0;   // heavy child missing from its parent's dictionary
  std::uint64_t candidate_mismatches = 0;  // list membership vs the exact half-threshold
  std::uint64_t internal_nodes = 0, leaves = 0;
  bool ok() const { return violations.empty() && coverage_violations == 0; }
};

/// Ordered multiset of word strings under lexicographic order. A string is a
/// sequence of 64-bit characters; the all-ones character is reserved.
class StringSet {
 public:
  using Str = std::vector<Key>;

  explicit StringSet(const StringSetConfig& cfg = StringSetConfig{});
  ~StringSet();
  StringSet(const StringSet&) = delete;
  StringSet& operator=(const StringSet&) = delete;

  void insert(const Str& s);
  bool erase(const Str& s);
  /// Largest stored string <= s.
  std::optional<Str> search(const Str& s) const;
  bool contains(const Str& s) const;
  /// Words of s shared with the closest stored string on its trie path.
  std::size_t lcp_length(const Str& s) const;

  std::size_t size() const { return size_; }
  std::uint64_t space_units() const;
  StringAudit audit() const;
  const StringStats& stats() const { return stats_; }
  /// Heavy threshold m^(1 - 1/k) for a node of weight m.
  std::uint64_t heavy_threshold(std::uint64_t m) const;
  std::uint64_t rebuild_period(std::uint64_t m) const;

 private:
  using Id = std::int32_t;
  static constexpr Id kNone = -1;

  struct TNode {
    bool leaf = false, alive = false;
    std::uint32_t gen = 0;
    std::uint32_t depth = 0;  // internal: index of the branching word
    Id parent = kNone;
    Key label = 0;            // word that selects this node in its parent
    std::uint64_t weight = 0; // stored strings below, with multiplicity
    // subtree boundaries in the leaf list
    Id first_leaf = kNone, last_leaf = kNone;
    // internal
    std::unique_ptr<OrderedSet> light;
    PerfectHash heavy;
    std::vector<std::pair<Id, std::uint32_t>> heavy_child;
    std::vector<Id> cand;
    std::uint64_t countdown = 1;
    std::optional<Handle> sweep;
    // as a child
    bool in_cand = false;
    std::uint32_t cand_pos = 0;
    // leaf
    Str str;  // shifted words with the 0 terminator
    std::uint64_t count = 0;
    Id prev_leaf = kNone, next_leaf = kNone;
  };

  enum class Stop { no_child, mismatch, exact };
  struct Descent {
    Id node = kNone;   // no_child: the branching node; otherwise the child entered
    std::size_t at = 0;  // index of the first differing word
    Stop stop = Stop::no_child;
    std::vector<Id> path;  // internal nodes from the root down
  };

  Str encode(const Str& s) const;
  Str decode(const Str& s) const;
  Descent descend(const Str& s) const;
  Id child(Id x, Key label) const;
  const Str& ref(Id x) const { return N(x).leaf ? N(x).str : N(N(x).first_leaf).str; }
  Id new_node(bool leaf);
  void kill(Id x);
  TNode& N(Id x) { return *nodes_[static_cast<std::size_t>(x)]; }
  const TNode& N(Id x) const { return *nodes_[static_cast<std::size_t>(x)]; }
  void add_child(Id x, Id c);
  void replace_child(Id x, Id old_c, Id new_c);
  void remove_child(Id x, Id c);
  void link_leaf(Id leaf, Id after);
  void unlink_leaf(Id leaf);
  void maintain(const std::vector<Id>& path, Id bottom);
  void update_cand(Id x, Id c);
  void drop_cand(Id x, Id c);
  void rebuild_heavy(Id x);

  StringSetConfig cfg_;
  double heavy_exp_;
  std::vector<std::unique_ptr<TNode>> nodes_;
  std::vector<Id> free_;
  Id root_ = kNone;
  Id head_ = kNone;  // first leaf
  std::size_t size_ = 0;
  mutable StringStats stats_;
};

}  // namespace xset
